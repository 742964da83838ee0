"""Evaluation against a held-out test log.

Two views: partition the test traces into those that followed the learned
policy versus those that did not and compare their KPIs; and, per prefix
length, compare each trace's KPI against the mean KPI of traces that share
its activity prefix and follow the policy from there on.
"""
from __future__ import annotations

from dataclasses import dataclass

from .._validation import check_non_negative_int, check_positive_int
from ..log.model import AnnotatedLog, AnnotatedTrace
from ..mdp.build import replay_trace
from ..mdp.model import Mdp
from ..rl.policy import Policy
from ..scenario.spec import ScenarioSpec


def _first_following_step(trace: AnnotatedTrace, policy: Policy, mdp: Mdp,
                          spec: ScenarioSpec, known_states: frozenset) -> int:
    """Smallest event index L such that every decision at or after L matches
    the policy (0 = the whole trace follows; len(trace) = only vacuously)."""
    worst = -1
    for t in replay_trace(trace, spec).transitions:
        ok = (t.source in known_states
              and policy.mapping.get(t.source) == t.action)
        if not ok:
            worst = max(worst, t.event_index)
    return worst + 1


def follows_policy(trace: AnnotatedTrace, policy: Policy, mdp: Mdp,
                   spec: ScenarioSpec, from_step: int = 0) -> bool:
    """True iff every agent decision at or after event index ``from_step``
    took the policy's action; decisions from states unknown to the MDP (or
    not covered by the policy) count as deviations."""
    check_non_negative_int(from_step, "from_step")
    known = frozenset(mdp.states)
    return _first_following_step(trace, policy, mdp, spec, known) <= from_step


# ---------------------------------------------------------------------------
# Per-partition KPI comparison


@dataclass(frozen=True)
class Rq1Row:
    label: str
    trace_count: int
    fraction: float
    avg_kpi: float | None
    outcome_rate: float | None


@dataclass(frozen=True)
class Rq1Report:
    all: Rq1Row
    following: Rq1Row
    deviating: Rq1Row
    n_unreplayable: int

    @property
    def rows(self) -> tuple[Rq1Row, Rq1Row, Rq1Row]:
        return (self.all, self.following, self.deviating)

    def to_dict(self) -> dict:
        return {
            "rows": [vars(r) for r in self.rows],
            "n_unreplayable": self.n_unreplayable,
        }


def _partition_row(label: str, traces: list[AnnotatedTrace], total: int,
                   spec: ScenarioSpec) -> Rq1Row:
    count = len(traces)
    if count == 0:
        return Rq1Row(label=label, trace_count=0, fraction=0.0,
                      avg_kpi=None, outcome_rate=None)
    kpis = [spec.kpi(t) for t in traces]
    successes = sum(1 for t in traces if spec.is_success(t))
    return Rq1Row(
        label=label,
        trace_count=count,
        fraction=count / total,
        avg_kpi=sum(kpis) / count,
        outcome_rate=successes / count,
    )


def rq1_report(test_log: AnnotatedLog, policy: Policy, mdp: Mdp,
               spec: ScenarioSpec) -> Rq1Report:
    """Compare the KPI of test traces that followed the policy from their
    first decision against those that did not."""
    if len(test_log) == 0:
        raise ValueError("cannot evaluate an empty test log")
    known = frozenset(mdp.states)
    following: list[AnnotatedTrace] = []
    deviating: list[AnnotatedTrace] = []
    unreplayable = 0
    for trace in test_log:
        result = replay_trace(trace, spec)
        if any(t.source not in known for t in result.transitions):
            unreplayable += 1
            deviating.append(trace)
            continue
        if all(policy.mapping.get(t.source) == t.action for t in result.transitions):
            following.append(trace)
        else:
            deviating.append(trace)
    total = len(test_log)
    return Rq1Report(
        all=_partition_row("All", list(test_log), total, spec),
        following=_partition_row("Following", following, total, spec),
        deviating=_partition_row("Deviating", deviating, total, spec),
        n_unreplayable=unreplayable,
    )


# ---------------------------------------------------------------------------
# Per-prefix delta-KPI analysis


@dataclass(frozen=True)
class Rq2Row:
    prefix_len: int
    avg_delta_kpi: float | None
    trace_count: int
    excluded_count: int


@dataclass(frozen=True)
class Rq2Report:
    rows: tuple[Rq2Row, ...]
    include_reference: bool

    def series(self) -> tuple[list[tuple[int, float | None]], list[tuple[int, int]]]:
        """(prefix length, avg delta) and (prefix length, trace count) columns."""
        deltas = [(r.prefix_len, r.avg_delta_kpi) for r in self.rows]
        counts = [(r.prefix_len, r.trace_count) for r in self.rows]
        return deltas, counts

    def to_dict(self) -> dict:
        return {
            "include_reference": self.include_reference,
            "rows": [vars(r) for r in self.rows],
        }


def rq2_prefix_analysis(test_log: AnnotatedLog, policy: Policy, mdp: Mdp,
                        spec: ScenarioSpec, max_prefix: int,
                        include_reference: bool = True) -> Rq2Report:
    """For each prefix length L: how much better do traces sharing a prefix
    and following the policy afterwards fare than the reference trace?

    For a reference trace t and length L, the estimate is the mean KPI of
    test traces whose first L activity labels equal t's and that follow the
    policy from event index L on; the delta is estimate minus t's own KPI.
    Rows average the deltas over all reference traces with a non-empty
    estimate; references without any matching continuation are counted as
    excluded.
    """
    check_positive_int(max_prefix, "max_prefix")
    if len(test_log) == 0:
        raise ValueError("cannot evaluate an empty test log")
    known = frozenset(mdp.states)
    traces = list(test_log)
    labels = [tuple(e.activity for e in t.events) for t in traces]
    kpis = [spec.kpi(t) for t in traces]
    first_ok = [
        _first_following_step(t, policy, mdp, spec, known) for t in traces
    ]

    rows: list[Rq2Row] = []
    for length in range(0, max_prefix + 1):
        groups: dict[tuple, list[int]] = {}
        for i, lab in enumerate(labels):
            if len(lab) >= length:
                groups.setdefault(lab[:length], []).append(i)
        deltas: list[float] = []
        excluded = 0
        for i, trace in enumerate(traces):
            if len(labels[i]) < length:
                continue
            matches = [
                j for j in groups[labels[i][:length]]
                if first_ok[j] <= length and (include_reference or j != i)
            ]
            if not matches:
                excluded += 1
                continue
            estimate = sum(kpis[j] for j in matches) / len(matches)
            deltas.append(estimate - kpis[i])
        rows.append(Rq2Row(
            prefix_len=length,
            avg_delta_kpi=sum(deltas) / len(deltas) if deltas else None,
            trace_count=len(deltas),
            excluded_count=excluded,
        ))
    return Rq2Report(rows=tuple(rows), include_reference=include_reference)
