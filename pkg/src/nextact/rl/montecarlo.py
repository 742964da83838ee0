"""Monte Carlo policy iteration over a compiled MDP.

Each round evaluates the current policy from scratch: episodes with
exploring starts (random decision state, random first action) average
first-visit returns into a fresh action-value table, so the greedy
improvement only ever sees returns collected under the policy it improves.
Mixing rounds would let stale returns from superseded policies bias the
estimates and freeze the loop in a suboptimal fixed point.  The loop stops
when the greedy policy no longer changes or the iteration budget is spent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .._validation import check_positive_int, check_rng
from ..mdp.model import Action, Mdp, State
from .policy import (
    Policy,
    QTable,
    customary_policy,
    greedy_policy,
    random_policy,
    unestimated_states,
)
from .sampling import EpisodeSampler


def mc_policy_evaluation(sampler: EpisodeSampler, policy: Policy, q: QTable, *,
                         episodes: int, rng: np.random.Generator,
                         first_visit: bool = True) -> int:
    """Run ``episodes`` exploring-start episodes and fold their returns into ``q``.

    Returns the number of episodes that were truncated at the horizon.
    """
    gamma = sampler.mdp.gamma
    states = sampler.decision_states
    if not states:
        return 0
    truncated = 0
    for _ in range(episodes):
        start = states[int(rng.integers(len(states)))]
        actions = sampler.mdp.actions_at(start)
        first_action = actions[int(rng.integers(len(actions)))]
        episode = sampler.sample_episode(policy, rng, start=start,
                                         first_action=first_action)
        if episode.truncated:
            truncated += 1
        returns = episode.returns(gamma)
        if first_visit:
            seen: set[tuple[State, Action]] = set()
            for step, g in zip(episode.steps, returns):
                key = (step.state, step.action)
                if key in seen:
                    continue
                seen.add(key)
                q.update(step.state, step.action, g)
        else:
            for step, g in zip(episode.steps, returns):
                q.update(step.state, step.action, g)
    return truncated


@dataclass(frozen=True)
class TrainResult:
    policy: Policy
    q: QTable
    n_iterations: int
    converged: bool
    history: tuple[dict, ...]


def _initial_value_estimate(mdp: Mdp, policy: Policy, q: QTable) -> float | None:
    """Expected estimated return of the policy's chosen actions at the start."""
    if not mdp.initial:
        return None
    total = 0.0
    for state, weight in mdp.initial.items():
        actions = mdp.actions_at(state)
        if not actions:
            continue
        action = policy.mapping.get(state)
        if action is None or (state, action) not in q:
            return None
        total += weight * q.get(state, action)
    return total


def policy_iteration(mdp: Mdp, *, episodes_per_iter: int = 2000, max_iters: int = 30,
                     seed: int | np.random.Generator | None = None,
                     first_visit: bool = True, horizon: int | None = None,
                     init: str = "customary") -> TrainResult:
    """Learn a deterministic policy for the supported actor.

    ``init`` chooses the behavior for the first evaluation round: the
    customary policy (default) or uniform random action choice.
    """
    check_positive_int(episodes_per_iter, "episodes_per_iter")
    check_positive_int(max_iters, "max_iters")
    rng = check_rng(seed)
    sampler = EpisodeSampler(mdp, horizon=horizon)
    customary = customary_policy(mdp)
    if init == "customary":
        policy = customary
    elif init == "random":
        policy = random_policy()
    else:
        raise ValueError(f"init must be 'customary' or 'random', got {init!r}")

    q = QTable()
    history: list[dict] = []
    converged = False
    iterations = 0
    for iteration in range(1, max_iters + 1):
        iterations = iteration
        q = QTable()  # returns under the current policy only
        truncated = mc_policy_evaluation(sampler, policy, q,
                                         episodes=episodes_per_iter, rng=rng,
                                         first_visit=first_visit)
        fallback = customary if policy.is_random else policy
        improved = greedy_policy(q, mdp, fallback=fallback)
        changes = sum(
            1 for state, action in improved.mapping.items()
            if policy.is_random or policy.mapping.get(state) != action
        )
        history.append({
            "iteration": iteration,
            "episodes": episodes_per_iter,
            "truncated_episodes": truncated,
            "q_pairs": len(q),
            "unestimated_states": len(unestimated_states(q, mdp)),
            "policy_changes": changes,
            "initial_value_estimate": _initial_value_estimate(mdp, improved, q),
        })
        if not policy.is_random and improved.mapping == policy.mapping:
            converged = True
            policy = improved
            break
        policy = improved
    return TrainResult(policy=policy, q=q, n_iterations=iterations,
                       converged=converged, history=tuple(history))


class MonteCarloPolicyIteration(BaseEstimator):
    """Estimator learning the next-activity policy from a compiled MDP.

    Parameters
    ----------
    episodes_per_iter : int, default=2000
        Exploring-start episodes per evaluation round.
    max_iters : int, default=30
        Improvement rounds before giving up on convergence.
    seed : int or numpy Generator, optional
        Source of randomness; fixing it makes training reproducible.
    first_visit : bool, default=True
        Average only each episode's first visit of a (state, action) pair.
    horizon : int, optional
        Step cap per episode; defaults to a generous multiple of the state count.
    init : {"customary", "random"}, default="customary"
        Behavior policy for the first evaluation round.
    """

    def __init__(self, episodes_per_iter: int = 2000, max_iters: int = 30,
                 seed: int | None = None, first_visit: bool = True,
                 horizon: int | None = None, init: str = "customary"):
        self.episodes_per_iter = episodes_per_iter
        self.max_iters = max_iters
        self.seed = seed
        self.first_visit = first_visit
        self.horizon = horizon
        self.init = init

    def fit(self, mdp: Mdp, y=None):
        result = policy_iteration(
            mdp,
            episodes_per_iter=self.episodes_per_iter,
            max_iters=self.max_iters,
            seed=self.seed,
            first_visit=self.first_visit,
            horizon=self.horizon,
            init=self.init,
        )
        self.mdp_ = mdp
        self.policy_ = result.policy
        self.q_ = result.q
        self.n_iterations_ = result.n_iterations
        self.converged_ = result.converged
        self.history_ = result.history
        return self

    def predict(self, states) -> list[Action]:
        if not hasattr(self, "policy_"):
            raise ValueError("MonteCarloPolicyIteration is not fitted yet; call fit first")
        single = isinstance(states, State)
        if single:
            states = [states]
        actions = [
            self.policy_.decide(state, self.mdp_.actions_at(state))
            for state in states
        ]
        return actions[0] if single else actions
