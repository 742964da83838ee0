"""Episode sampling over a compiled MDP.

The sampler precomputes cumulative branch probabilities per (state, action)
once, so drawing hundreds of thousands of episodes stays cheap.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from ..mdp.model import Action, Mdp, State
from .policy import Policy, PolicyError


class DeadEndError(RuntimeError):
    """A non-terminal state with no actions was reached while sampling."""


@dataclass(frozen=True)
class Step:
    state: State
    action: Action
    reward: float


@dataclass(frozen=True)
class Episode:
    steps: tuple[Step, ...]
    final_state: State
    truncated: bool

    @property
    def total_reward(self) -> float:
        return sum(step.reward for step in self.steps)

    def returns(self, gamma: float) -> tuple[float, ...]:
        """Discounted return from each step onwards."""
        out = [0.0] * len(self.steps)
        g = 0.0
        for i in range(len(self.steps) - 1, -1, -1):
            g = self.steps[i].reward + gamma * g
            out[i] = g
        return tuple(out)


class EpisodeSampler:
    """Samples trajectories from an MDP under a policy."""

    def __init__(self, mdp: Mdp, horizon: int | None = None):
        self.mdp = mdp
        if horizon is None:
            # twice the longest training trace when known, else a generous
            # cap: empirical cycles must not hang the sampler
            max_decisions = int(mdp.meta.get("max_decisions") or 0)
            horizon = (2 * max_decisions) if max_decisions > 0 else max(10 * mdp.n_states, 200)
        self.horizon = horizon
        self.actions_by_state: dict[State, tuple[Action, ...]] = {
            s: mdp.actions_at(s) for s in mdp.nonterminal_states
        }
        self._branches: dict[tuple[State, Action], tuple[list[float], list[State], list[float]]] = {}
        for state, actions in self.actions_by_state.items():
            for action in actions:
                edges = mdp.edges_from(state, action)
                cum: list[float] = []
                total = 0.0
                for e in edges:
                    total += e.probability
                    cum.append(total)
                cum[-1] = 1.0  # guard the last bucket against float drift
                self._branches[(state, action)] = (
                    cum, [e.target for e in edges], [e.reward for e in edges])
        self.decision_states: tuple[State, ...] = tuple(
            s for s in mdp.nonterminal_states if self.actions_by_state[s])
        init_states = mdp.initial_states()
        self._init_states = init_states
        self._init_cum: list[float] = []
        total = 0.0
        for s in init_states:
            total += mdp.initial[s]
            self._init_cum.append(total)
        if self._init_cum:
            self._init_cum[-1] = 1.0

    def sample_initial(self, rng: np.random.Generator) -> State:
        if not self._init_states:
            raise PolicyError("MDP has an empty initial distribution")
        idx = bisect.bisect_right(self._init_cum, float(rng.random()))
        return self._init_states[min(idx, len(self._init_states) - 1)]

    def step(self, state: State, action: Action,
             rng: np.random.Generator) -> tuple[State, float]:
        cum, targets, rewards = self._branches[(state, action)]
        idx = bisect.bisect_right(cum, float(rng.random()))
        idx = min(idx, len(targets) - 1)
        return targets[idx], rewards[idx]

    def sample_episode(self, policy: Policy, rng: np.random.Generator, *,
                       start: State | None = None,
                       first_action: Action | None = None) -> Episode:
        state = start if start is not None else self.sample_initial(rng)
        steps: list[Step] = []
        truncated = False
        forced = first_action
        while not state.terminal:
            actions = self.actions_by_state.get(state, ())
            if not actions:
                raise DeadEndError(
                    f"non-terminal state {state} has no available actions")
            if forced is not None:
                action = forced
                forced = None
            else:
                action = policy.decide(state, actions, rng)
            next_state, reward = self.step(state, action, rng)
            steps.append(Step(state=state, action=action, reward=reward))
            state = next_state
            if len(steps) >= self.horizon:
                truncated = True
                break
        return Episode(steps=tuple(steps), final_state=state, truncated=truncated)
