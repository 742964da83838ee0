"""MDP model, log-replay construction, and persistence."""
from .model import START_LA, START_STATE, Action, Edge, Mdp, MdpError, State
from .build import (
    MdpBuilder,
    ReplayResult,
    ReplaySummary,
    Transition,
    TransitionGroup,
    build_mdp,
    current_state,
    mdp_stats,
    reliability_coefficient,
    replay_groups,
    replay_trace,
)
from .io import export_dot, load_mdp, mdp_to_dot, save_mdp

__all__ = [
    "START_LA", "START_STATE", "Action", "Edge", "Mdp", "MdpBuilder",
    "MdpError", "ReplayResult", "ReplaySummary", "State", "Transition",
    "TransitionGroup", "build_mdp", "current_state", "export_dot", "load_mdp",
    "mdp_stats", "mdp_to_dot", "reliability_coefficient", "replay_groups",
    "replay_trace", "save_mdp",
]
