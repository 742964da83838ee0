"""Exact dynamic-programming solvers, used as ground truth for the
Monte Carlo trainer and for diagnostics on small models.

Policy evaluation solves the linear system (I - gamma * P_pi) v = r_pi over
the decision states; terminal and dead-end states are worth zero.  Optimal
values come from policy iteration with exact evaluation and the same
deterministic tie-breaking the Monte Carlo side uses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..mdp.model import Action, Mdp, State
from .policy import Policy, customary_policy


class EvaluationError(RuntimeError):
    """The policy keeps mass in a cycle forever; undiscounted values diverge."""


def _decision_states(mdp: Mdp) -> list[State]:
    return [s for s in mdp.nonterminal_states if mdp.actions_at(s)]


def exact_state_values(mdp: Mdp, policy: Policy) -> dict[State, float]:
    """Expected return from every state under ``policy`` (exact)."""
    states = _decision_states(mdp)
    if not states:
        return {}
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    p = np.zeros((n, n))
    r = np.zeros(n)
    for state in states:
        i = index[state]
        actions = mdp.actions_at(state)
        for action, prob in policy.action_probs(state, actions).items():
            for edge in mdp.edges_from(state, action):
                r[i] += prob * edge.probability * edge.reward
                j = index.get(edge.target)
                if j is not None:
                    p[i, j] += prob * edge.probability
    a = np.eye(n) - mdp.gamma * p
    try:
        v = np.linalg.solve(a, r)
    except np.linalg.LinAlgError as exc:
        raise EvaluationError(
            "policy evaluation has no finite solution; the policy never "
            "leaves some cycle") from exc
    return {state: float(v[index[state]]) for state in states}


def exact_q_values(mdp: Mdp, values: dict[State, float]) -> dict[tuple[State, Action], float]:
    q: dict[tuple[State, Action], float] = {}
    for state in _decision_states(mdp):
        for action in mdp.actions_at(state):
            total = 0.0
            for edge in mdp.edges_from(state, action):
                total += edge.probability * (
                    edge.reward + mdp.gamma * values.get(edge.target, 0.0))
            q[(state, action)] = total
    return q


@dataclass(frozen=True)
class ExactResult:
    policy: Policy
    values: dict[State, float]
    q: dict[tuple[State, Action], float]
    n_iterations: int


def exact_policy_iteration(mdp: Mdp, *, init: Policy | None = None,
                           max_iters: int = 1000) -> ExactResult:
    """Optimal deterministic policy by policy iteration with exact evaluation."""
    policy = init if init is not None else customary_policy(mdp)
    values: dict[State, float] = {}
    q: dict[tuple[State, Action], float] = {}
    for iteration in range(1, max_iters + 1):
        values = exact_state_values(mdp, policy)
        q = exact_q_values(mdp, values)
        mapping: dict[State, Action] = {}
        for state in _decision_states(mdp):
            actions = mdp.actions_at(state)
            best = max(q[(state, action)] for action in actions)
            mapping[state] = min(a for a in actions if q[(state, a)] == best)
        improved = Policy(kind="optimal", mapping=mapping,
                          scenario_id=mdp.meta.get("scenario_id"))
        if not policy.is_random and improved.mapping == policy.mapping:
            return ExactResult(policy=improved, values=values, q=q,
                               n_iterations=iteration)
        policy = improved
    raise EvaluationError(f"policy iteration did not converge in {max_iters} rounds")


def value_at_initial(mdp: Mdp, values: dict[State, float]) -> float:
    """Expected return under the MDP's empirical initial-state distribution."""
    return sum(weight * values.get(state, 0.0) for state, weight in mdp.initial.items())
