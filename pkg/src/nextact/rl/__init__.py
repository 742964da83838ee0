"""Policy learning: Monte Carlo policy iteration plus exact DP solvers."""
from .policy import NEG_INF, Policy, PolicyError, QTable, customary_policy, greedy_policy, random_policy
from .sampling import Episode, EpisodeSampler, Step
from .montecarlo import (
    MonteCarloPolicyIteration,
    TrainResult,
    mc_policy_evaluation,
    policy_iteration,
)
from .exact import (
    EvaluationError,
    ExactResult,
    exact_policy_iteration,
    exact_q_values,
    exact_state_values,
    value_at_initial,
)
from .io import POLICY_FORMAT, POLICY_VERSION, load_policy_artifact, save_policy_artifact

__all__ = [
    "NEG_INF", "Episode", "EpisodeSampler", "EvaluationError", "ExactResult",
    "MonteCarloPolicyIteration", "POLICY_FORMAT", "POLICY_VERSION", "Policy",
    "PolicyError", "QTable", "Step", "TrainResult", "customary_policy",
    "exact_policy_iteration", "exact_q_values", "exact_state_values",
    "greedy_policy", "load_policy_artifact", "mc_policy_evaluation",
    "policy_iteration", "random_policy", "save_policy_artifact",
    "value_at_initial",
]
