"""Policies over MDP states and the tabular action-value store."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from ..mdp.model import Action, Mdp, State


class PolicyError(ValueError):
    pass


NEG_INF = float("-inf")


class QTable:
    """Running per-(state, action) mean of observed returns."""

    def __init__(self) -> None:
        self._mean: dict[tuple[State, Action], float] = {}
        self._count: dict[tuple[State, Action], int] = {}

    def __len__(self) -> int:
        return len(self._mean)

    def __contains__(self, key: tuple[State, Action]) -> bool:
        return key in self._mean

    def get(self, state: State, action: Action, default: float = NEG_INF) -> float:
        return self._mean.get((state, action), default)

    def count(self, state: State, action: Action) -> int:
        return self._count.get((state, action), 0)

    def update(self, state: State, action: Action, value: float) -> None:
        key = (state, action)
        n = self._count.get(key, 0) + 1
        self._count[key] = n
        old = self._mean.get(key, 0.0)
        self._mean[key] = old + (value - old) / n

    def actions_estimated(self, state: State) -> tuple[Action, ...]:
        return tuple(sorted(a for (s, a) in self._mean if s == state))

    def items(self) -> Iterator[tuple[State, Action, float, int]]:
        for (state, action) in sorted(self._mean, key=lambda k: (k[0].key(), k[1])):
            yield state, action, self._mean[(state, action)], self._count[(state, action)]

    def to_dict(self) -> dict:
        return {"entries": [
            {"state": s.to_dict(), "action": a, "mean": m, "count": n}
            for s, a, m, n in self.items()
        ]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "QTable":
        table = cls()
        for entry in data["entries"]:
            key = (State.from_dict(entry["state"]), entry["action"])
            table._mean[key] = float(entry["mean"])
            table._count[key] = int(entry["count"])
        return table


@dataclass(frozen=True)
class Policy:
    """A way of choosing the next action in each state.

    Deterministic policies carry an explicit state-to-action mapping; the
    ``random`` kind ignores the mapping and draws uniformly from whatever
    actions are available.  ``scenario_id`` records which scenario the
    policy was learned for (None = usable anywhere, e.g. random).
    """

    kind: str
    mapping: Mapping[State, Action] = field(default_factory=dict)
    scenario_id: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapping", dict(self.mapping))

    @property
    def is_random(self) -> bool:
        return self.kind == "random"

    def decide(self, state: State, actions: tuple[Action, ...],
               rng: np.random.Generator | None = None) -> Action:
        if self.is_random:
            if not actions:
                raise PolicyError(f"no actions available in state {state}")
            if rng is None:
                raise PolicyError("a random policy needs an rng to decide")
            return actions[int(rng.integers(len(actions)))]
        try:
            return self.mapping[state]
        except KeyError:
            raise PolicyError(
                f"{self.kind} policy has no action for state {state}") from None

    def action_probs(self, state: State, actions: tuple[Action, ...]) -> dict[Action, float]:
        """Distribution over actions in ``state`` (uniform for the random kind)."""
        if self.is_random:
            if not actions:
                raise PolicyError(f"no actions available in state {state}")
            p = 1.0 / len(actions)
            return {a: p for a in actions}
        return {self.decide(state, actions): 1.0}

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "scenario_id": self.scenario_id,
            "entries": [
                {"state": s.to_dict(), "action": self.mapping[s]}
                for s in sorted(self.mapping, key=State.key)
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Policy":
        return cls(
            kind=data["kind"],
            mapping={State.from_dict(e["state"]): e["action"] for e in data["entries"]},
            scenario_id=data.get("scenario_id"),
        )


def random_policy() -> Policy:
    return Policy(kind="random")


def customary_policy(mdp: Mdp) -> Policy:
    """In each state, do what was done most often in the log (ties: first
    action in label order)."""
    mapping: dict[State, Action] = {}
    for state in mdp.nonterminal_states:
        actions = mdp.actions_at(state)
        if not actions:
            continue
        usage = {a: sum(e.count for e in mdp.edges_from(state, a)) for a in actions}
        best = max(usage.values())
        mapping[state] = min(a for a in actions if usage[a] == best)
    return Policy(kind="customary", mapping=mapping,
                  scenario_id=mdp.meta.get("scenario_id"))


def greedy_policy(q: QTable, mdp: Mdp, kind: str = "optimal",
                  fallback: Policy | None = None) -> Policy:
    """Greedy improvement over estimated action values.

    Actions never estimated count as minus infinity; ties break to the first
    action in label order, so the result is deterministic.  A state where
    nothing was estimated keeps the fallback policy's action (typically the
    previous or the customary policy) when one is supplied and valid there.
    """
    mapping: dict[State, Action] = {}
    for state in mdp.nonterminal_states:
        actions = mdp.actions_at(state)
        if not actions:
            continue
        best = max(q.get(state, a) for a in actions)
        if best == NEG_INF and fallback is not None:
            kept = fallback.mapping.get(state)
            if kept in actions:
                mapping[state] = kept
                continue
        mapping[state] = min(a for a in actions if q.get(state, a) == best)
    return Policy(kind=kind, mapping=mapping,
                  scenario_id=mdp.meta.get("scenario_id"))


def unestimated_states(q: QTable, mdp: Mdp) -> tuple[State, ...]:
    """Decision states where no action has an estimate yet."""
    out = []
    for state in mdp.nonterminal_states:
        actions = mdp.actions_at(state)
        if actions and all((state, a) not in q for a in actions):
            out.append(state)
    return tuple(out)
