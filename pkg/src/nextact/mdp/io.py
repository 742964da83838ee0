"""Persist MDPs as checksummed JSON and export them to Graphviz DOT."""
from __future__ import annotations

from pathlib import Path

from ..artifacts import read_artifact, write_artifact
from .model import Mdp, State

MDP_FORMAT = "nextact-mdp"
MDP_VERSION = 1


def save_mdp(mdp: Mdp, path: str | Path) -> None:
    write_artifact(path, MDP_FORMAT, mdp.to_dict(), MDP_VERSION)


def load_mdp(path: str | Path) -> Mdp:
    mdp = Mdp.from_dict(read_artifact(path, MDP_FORMAT, MDP_VERSION))
    mdp.validate()
    return mdp


def _dot_quote(text: str) -> str:
    # keep backslashes untouched so "\n" line breaks in labels survive
    return '"' + text.replace('"', '\\"') + '"'


def _node_label(state: State) -> str:
    parts = [state.la, *map(str, state.hf), *map(str, state.ef)]
    return ", ".join(parts)


def mdp_to_dot(mdp: Mdp) -> str:
    """Render the MDP as a DOT digraph.

    States become nodes (terminal ones double-circled), grouped transitions
    become edges labeled with action, probability, reward, and support;
    initial states get a dashed arrow from an entry point.
    """
    ids = {state: f"s{i}" for i, state in enumerate(mdp.states)}
    lines = ["digraph mdp {", "  rankdir=LR;", '  node [shape=ellipse, fontsize=10];']
    for state in mdp.states:
        attrs = [f"label={_dot_quote(_node_label(state))}"]
        if state.terminal:
            attrs.append("peripheries=2")
        if state.is_start:
            attrs.append("style=bold")
        lines.append(f"  {ids[state]} [{', '.join(attrs)}];")
    if mdp.initial:
        lines.append('  entry [shape=point, label=""];')
        for state in mdp.initial_states():
            p = mdp.initial[state]
            lines.append(
                f"  entry -> {ids[state]} [style=dashed, label={_dot_quote(f'{p:.3f}')}];")
    for edge in mdp.edges:
        label = f"{edge.action}\\np={edge.probability:.3f} r={edge.reward:.2f} n={edge.count}"
        lines.append(
            f"  {ids[edge.source]} -> {ids[edge.target]} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(mdp: Mdp, path: str | Path) -> None:
    Path(path).write_text(mdp_to_dot(mdp), encoding="utf-8")
