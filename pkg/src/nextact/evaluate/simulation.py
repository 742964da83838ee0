"""Policy evaluation by simulating cases on a test MDP.

Each simulated case starts from the empirical initial distribution and runs
until a terminal state (or the step cap).  The report carries the mean total
return as the average KPI, the fraction of cases that touched a success
state, and the standard error of the mean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._validation import check_positive_int
from ..mdp.model import Mdp
from ..rl.policy import Policy, customary_policy
from ..rl.sampling import DeadEndError, EpisodeSampler

DEFAULT_N_CASES = 100_000


class CompatibilityError(ValueError):
    """Policy and MDP belong to different scenarios."""


@dataclass(frozen=True)
class SimReport:
    policy_kind: str
    n_cases: int
    avg_kpi: float
    outcome_rate: float
    std_error: float
    seed: int | None
    fallback_decisions: int = 0
    truncated_cases: int = 0

    def to_dict(self) -> dict:
        return {
            "policy_kind": self.policy_kind,
            "n_cases": self.n_cases,
            "avg_kpi": self.avg_kpi,
            "outcome_rate": self.outcome_rate,
            "std_error": self.std_error,
            "seed": self.seed,
            "fallback_decisions": self.fallback_decisions,
            "truncated_cases": self.truncated_cases,
        }


def _check_compatible(mdp: Mdp, policy: Policy) -> None:
    mdp_scenario = mdp.meta.get("scenario_id")
    if (policy.scenario_id is not None and mdp_scenario is not None
            and policy.scenario_id != mdp_scenario):
        raise CompatibilityError(
            f"policy was learned for scenario {policy.scenario_id!r} but the "
            f"MDP belongs to {mdp_scenario!r}")


def simulate_policy(mdp: Mdp, policy: Policy, *, n_cases: int = DEFAULT_N_CASES,
                    seed: int | None = None, horizon: int | None = None,
                    rng: np.random.Generator | None = None,
                    sampler: EpisodeSampler | None = None) -> SimReport:
    """Estimate a policy's average KPI and outcome rate over simulated cases.

    States the policy does not cover (or covers with an action the MDP has
    never seen there) fall back to the customary action at that state; such
    decisions are counted in the report.
    """
    check_positive_int(n_cases, "n_cases")
    _check_compatible(mdp, policy)
    if rng is None:
        rng = np.random.default_rng(seed)
    if sampler is None:
        sampler = EpisodeSampler(mdp, horizon=horizon)
    success_las = frozenset(mdp.meta.get("success_las", ()))
    fallback = customary_policy(mdp) if not policy.is_random else None

    totals = np.empty(n_cases)
    successes = 0
    fallback_decisions = 0
    truncated_cases = 0
    horizon_cap = sampler.horizon
    actions_of = sampler.actions_by_state
    gamma = mdp.gamma
    for case in range(n_cases):
        state = sampler.sample_initial(rng)
        total = 0.0
        discount = 1.0
        succeeded = state.la in success_las
        steps = 0
        while not state.terminal:
            actions = actions_of.get(state, ())
            if not actions:
                raise DeadEndError(
                    f"non-terminal state {state} has no available actions")
            if policy.is_random:
                action = actions[int(rng.integers(len(actions)))]
            else:
                action = policy.mapping.get(state)
                if action is None or action not in actions:
                    action = fallback.mapping[state]
                    fallback_decisions += 1
            state, reward = sampler.step(state, action, rng)
            total += discount * reward
            discount *= gamma
            if state.la in success_las:
                succeeded = True
            steps += 1
            if steps >= horizon_cap:
                truncated_cases += 1
                break
        totals[case] = total
        if succeeded:
            successes += 1

    avg = float(totals.mean())
    std_error = float(totals.std(ddof=1) / math.sqrt(n_cases)) if n_cases > 1 else 0.0
    return SimReport(
        policy_kind=policy.kind,
        n_cases=n_cases,
        avg_kpi=avg,
        outcome_rate=successes / n_cases,
        std_error=std_error,
        seed=seed,
        fallback_decisions=fallback_decisions,
        truncated_cases=truncated_cases,
    )


def compare_policies(mdp: Mdp, policies: list[Policy], *,
                     n_cases: int = DEFAULT_N_CASES, seed: int | None = None,
                     horizon: int | None = None) -> list[SimReport]:
    """Simulate each policy on the same MDP and rank the reports by KPI.

    Every policy gets its own child seed stream derived from (seed, position),
    so adding or reordering policies never perturbs the others' draws.
    """
    if not policies:
        raise ValueError("compare_policies needs at least one policy")
    sampler = EpisodeSampler(mdp, horizon=horizon)
    children = np.random.SeedSequence(seed).spawn(len(policies))
    reports = [
        simulate_policy(mdp, policy, n_cases=n_cases, seed=seed,
                        rng=np.random.default_rng(children[i]), sampler=sampler)
        for i, policy in enumerate(policies)
    ]
    return sorted(reports, key=lambda r: r.avg_kpi, reverse=True)


def project_action(mdp: Mdp, policy: Policy, start, first_action, *,
                   n_cases: int = 2000, seed: int | None = 0,
                   horizon: int | None = None,
                   sampler: EpisodeSampler | None = None) -> SimReport:
    """Projected value of taking ``first_action`` at ``start`` and then
    following the policy: mean total future return over simulated
    continuations, with the same fallback rules as :func:`simulate_policy`.
    """
    check_positive_int(n_cases, "n_cases")
    _check_compatible(mdp, policy)
    if sampler is None:
        sampler = EpisodeSampler(mdp, horizon=horizon)
    if start.terminal:
        raise ValueError(f"cannot project an action at terminal state {start}")
    first_actions = sampler.actions_by_state.get(start, ())
    if first_action not in first_actions:
        raise ValueError(
            f"action {first_action!r} is not available at {start}; "
            f"choose from {list(first_actions)}")
    rng = np.random.default_rng(seed)
    success_las = frozenset(mdp.meta.get("success_las", ()))
    fallback = customary_policy(mdp) if not policy.is_random else None

    totals = np.empty(n_cases)
    successes = 0
    fallback_decisions = 0
    truncated_cases = 0
    horizon_cap = sampler.horizon
    actions_of = sampler.actions_by_state
    gamma = mdp.gamma
    for case in range(n_cases):
        state = start
        succeeded = state.la in success_las
        action = first_action
        total = 0.0
        discount = 1.0
        steps = 0
        while True:
            state, reward = sampler.step(state, action, rng)
            total += discount * reward
            discount *= gamma
            if state.la in success_las:
                succeeded = True
            steps += 1
            if state.terminal:
                break
            if steps >= horizon_cap:
                truncated_cases += 1
                break
            actions = actions_of.get(state, ())
            if not actions:
                raise DeadEndError(
                    f"non-terminal state {state} has no available actions")
            if policy.is_random:
                action = actions[int(rng.integers(len(actions)))]
            else:
                action = policy.mapping.get(state)
                if action is None or action not in actions:
                    action = fallback.mapping[state]
                    fallback_decisions += 1
        totals[case] = total
        if succeeded:
            successes += 1

    avg = float(totals.mean())
    std_error = float(totals.std(ddof=1) / math.sqrt(n_cases)) if n_cases > 1 else 0.0
    return SimReport(
        policy_kind=policy.kind,
        n_cases=n_cases,
        avg_kpi=avg,
        outcome_rate=successes / n_cases,
        std_error=std_error,
        seed=seed,
        fallback_decisions=fallback_decisions,
        truncated_cases=truncated_cases,
    )
