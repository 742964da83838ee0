"""Markov decision process model compiled from an annotated event log.

A state is the triple (last activity, history features, environment
features) plus a terminal flag; two states are equal iff every component
is equal.  Actions are activity labels (optionally suffixed with a time
bucket).  Edges carry the empirical transition probability, the average
reward observed along the grouped transitions, and the support count the
probability was computed from.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..log.model import Scalar

START_LA = "<start>"

Action = str


@dataclass(frozen=True, slots=True)
class State:
    la: str
    hf: tuple[Scalar, ...] = ()
    ef: tuple[Scalar, ...] = ()
    terminal: bool = False

    def key(self) -> str:
        """Canonical sort/serialization key, stable across processes."""
        return json.dumps([self.la, list(self.hf), list(self.ef), self.terminal],
                          separators=(",", ":"), sort_keys=True)

    @property
    def is_start(self) -> bool:
        return self.la == START_LA and not self.hf and not self.ef

    def to_dict(self) -> dict:
        return {"la": self.la, "hf": list(self.hf), "ef": list(self.ef),
                "terminal": self.terminal}

    @classmethod
    def from_dict(cls, data: Mapping) -> "State":
        return cls(la=data["la"], hf=tuple(data["hf"]), ef=tuple(data["ef"]),
                   terminal=bool(data["terminal"]))

    def __str__(self) -> str:  # pragma: no cover - debugging aid
        parts = [self.la, *map(str, self.hf), *map(str, self.ef)]
        tag = "*" if self.terminal else ""
        return "<" + ", ".join(parts) + ">" + tag


START_STATE = State(la=START_LA)


@dataclass(frozen=True, slots=True)
class Edge:
    source: State
    action: Action
    target: State
    probability: float
    reward: float
    count: int

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "action": self.action,
            "target": self.target.to_dict(),
            "probability": self.probability,
            "reward": self.reward,
            "count": self.count,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Edge":
        return cls(
            source=State.from_dict(data["source"]),
            action=data["action"],
            target=State.from_dict(data["target"]),
            probability=float(data["probability"]),
            reward=float(data["reward"]),
            count=int(data["count"]),
        )


class MdpError(ValueError):
    """The MDP is internally inconsistent."""


PROB_TOL = 1e-9


@dataclass(eq=False)
class Mdp:
    states: tuple[State, ...]
    edges: tuple[Edge, ...]
    initial: dict[State, float]
    gamma: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.states = tuple(sorted(self.states, key=State.key))
        self.edges = tuple(sorted(
            self.edges, key=lambda e: (e.source.key(), e.action, e.target.key())))
        self._by_source: dict[State, dict[Action, list[Edge]]] = {}
        for edge in self.edges:
            self._by_source.setdefault(edge.source, {}).setdefault(edge.action, []).append(edge)
        self._state_set = frozenset(self.states)

    # -- structure queries -------------------------------------------------
    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def action_labels(self) -> tuple[Action, ...]:
        return tuple(sorted({e.action for e in self.edges}))

    @property
    def terminal_states(self) -> tuple[State, ...]:
        return tuple(s for s in self.states if s.terminal)

    @property
    def nonterminal_states(self) -> tuple[State, ...]:
        return tuple(s for s in self.states if not s.terminal)

    def actions_at(self, state: State) -> tuple[Action, ...]:
        return tuple(sorted(self._by_source.get(state, {})))

    def edges_from(self, state: State, action: Action) -> tuple[Edge, ...]:
        return tuple(self._by_source.get(state, {}).get(action, ()))

    def transition_groups(self, state: State) -> dict[Action, tuple[Edge, ...]]:
        """Outgoing edges grouped by action; empty for terminal states."""
        if state not in self._state_set:
            raise MdpError(f"state not in this MDP: {state}")
        groups = self._by_source.get(state, {})
        return {action: tuple(groups[action]) for action in sorted(groups)}

    def has_state(self, state: State) -> bool:
        return state in self._state_set

    def out_edges(self, state: State) -> tuple[Edge, ...]:
        groups = self._by_source.get(state, {})
        return tuple(e for action in sorted(groups) for e in groups[action])

    def initial_states(self) -> tuple[State, ...]:
        return tuple(sorted(self.initial, key=State.key))

    # -- consistency -------------------------------------------------------
    def validate(self) -> None:
        known = self._state_set
        for edge in self.edges:
            if edge.source not in known or edge.target not in known:
                raise MdpError(f"edge references unknown state: {edge}")
            if not edge.target.terminal and edge.target not in self._by_source:
                raise MdpError(
                    f"non-terminal state {edge.target} is reached but has no "
                    f"outgoing actions")
            if edge.source.terminal:
                raise MdpError(f"terminal state has outgoing edge: {edge.source}")
            if not 0.0 < edge.probability <= 1.0:
                raise MdpError(f"edge probability out of range: {edge}")
            if edge.count < 1:
                raise MdpError(f"edge with non-positive support: {edge}")
        for state, groups in self._by_source.items():
            for action, edges in groups.items():
                total_p = sum(e.probability for e in edges)
                if abs(total_p - 1.0) > PROB_TOL:
                    raise MdpError(
                        f"probabilities for ({state}, {action}) sum to {total_p!r}")
                total_n = sum(e.count for e in edges)
                for e in edges:
                    if abs(e.probability - e.count / total_n) > PROB_TOL:
                        raise MdpError(
                            f"probability of {e} inconsistent with counts "
                            f"({e.count}/{total_n})")
        if self.initial:
            total = sum(self.initial.values())
            if abs(total - 1.0) > PROB_TOL:
                raise MdpError(f"initial distribution sums to {total!r}")
            for state in self.initial:
                if state not in known:
                    raise MdpError(f"initial distribution references unknown state {state}")

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "meta": dict(sorted(self.meta.items())),
            "states": [s.to_dict() for s in self.states],
            "edges": [e.to_dict() for e in self.edges],
            "initial": [
                {"state": s.to_dict(), "probability": self.initial[s]}
                for s in self.initial_states()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Mdp":
        return cls(
            states=tuple(State.from_dict(d) for d in data["states"]),
            edges=tuple(Edge.from_dict(d) for d in data["edges"]),
            initial={State.from_dict(d["state"]): float(d["probability"])
                     for d in data["initial"]},
            gamma=float(data["gamma"]),
            meta=dict(data["meta"]),
        )


def states_of(edges: Iterable[Edge], extra: Iterable[State] = ()) -> tuple[State, ...]:
    seen: dict[State, None] = {}
    for edge in edges:
        seen.setdefault(edge.source)
        seen.setdefault(edge.target)
    for state in extra:
        seen.setdefault(state)
    return tuple(sorted(seen, key=State.key))
