"""Declarative scenario definitions.

A :class:`ScenarioSpec` encodes one decision problem as pure data: which
activities belong to the supported actor, which feature extractors build the
state, and which reward terms decompose the trace-level KPI into per-step
utilities. Specs serialize to JSON so new scenarios can be authored without
code changes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

from ..log.model import Actor, AnnotatedEvent, AnnotatedTrace, EventLog, Scalar

MISSING = "na"


class ScenarioError(ValueError):
    pass


class MissingDurationsError(ScenarioError):
    """A cost term needs a per-activity duration table; calibrate the scenario config first."""


class KpiUndefinedError(ScenarioError):
    """KPI requested for an execution that has not completed."""


# ---------------------------------------------------------------------------
# Feature extraction rules


@dataclass(frozen=True)
class CounterRule:
    """Running per-trace count of matching activities.

    With ``after`` set, counting starts strictly after the first occurrence of
    any listed activity. With ``boolean`` the feature saturates at 1.
    """

    name: str
    activities: frozenset[str]
    after: frozenset[str] = frozenset()
    boolean: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "activities", frozenset(self.activities))
        object.__setattr__(self, "after", frozenset(self.after))


@dataclass(frozen=True)
class TimeBucketRule:
    """Elapsed-time bucket: floor(days since the trace's first event / bucket_days)."""

    name: str
    bucket_days: int = 60


@dataclass(frozen=True)
class AmountClassRule:
    """Bucket a numeric amount into labeled classes.

    ``bounds`` are the class upper bounds; ``labels`` has one more entry than
    ``bounds``. With ``upper_inclusive`` a value equal to a bound falls in the
    lower class. The amount comes from a trace attribute or, otherwise, from
    the most recent event payload carrying ``source``; before any value is
    seen the feature is ``"na"``.
    """

    name: str
    source: str
    bounds: tuple[float, ...]
    labels: tuple[str, ...]
    from_trace: bool = True
    upper_inclusive: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.bounds) + 1:
            raise ScenarioError(f"{self.name}: need {len(self.bounds) + 1} labels, got {len(self.labels)}")

    def classify(self, amount: float | None) -> str:
        if amount is None:
            return MISSING
        for bound, label in zip(self.bounds, self.labels):
            if (amount <= bound) if self.upper_inclusive else (amount < bound):
                return label
        return self.labels[-1]


HistoryRule = CounterRule | TimeBucketRule


@dataclass(frozen=True)
class PaymentRule:
    """Classify payment progress into the ``payType`` feature.

    A payment event pays ``paid_attr`` from its payload, or the full owed
    amount when the payload carries no explicit figure. ``payType`` becomes
    ``full`` once the cumulative amount paid covers the owed amount (taken
    from the latest ``owed_source`` payload), ``partial`` otherwise, and
    ``appeal`` on appeal events.
    """

    payment_activities: frozenset[str]
    owed_source: str
    paid_attr: str | None = "paid"
    appeal_activities: frozenset[str] = frozenset()
    feature_name: str = "payType"

    def __post_init__(self) -> None:
        object.__setattr__(self, "payment_activities", frozenset(self.payment_activities))
        object.__setattr__(self, "appeal_activities", frozenset(self.appeal_activities))


# ---------------------------------------------------------------------------
# Reward terms


@dataclass(frozen=True)
class ActivityCostTerm:
    """Cost of the actor's working time: -avg_duration(activity) * hourly rate."""

    rate_per_hour: float
    attenuated: bool = False

    def contribution(self, event: AnnotatedEvent, trace_attrs: Mapping[str, Scalar],
                     durations: Mapping[str, float] | None) -> float:
        if event.actor is not Actor.AGENT:
            return 0.0
        if durations is None:
            raise MissingDurationsError(
                "activity cost term needs a duration table; call spec.calibrate(log) first"
            )
        return -durations.get(event.activity, 0.0) * self.rate_per_hour


@dataclass(frozen=True)
class AcceptanceInterestTerm:
    """Interest earned when the counterpart accepts: rate(amount class) * amount."""

    acceptance_activities: frozenset[str]
    class_feature: str
    rates: Mapping[str, float]
    amount_source: str
    attenuated: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "acceptance_activities", frozenset(self.acceptance_activities))
        object.__setattr__(self, "rates", dict(self.rates))

    def contribution(self, event: AnnotatedEvent, trace_attrs: Mapping[str, Scalar],
                     durations: Mapping[str, float] | None) -> float:
        if event.activity not in self.acceptance_activities:
            return 0.0
        label = event.derived.get(self.class_feature)
        amount = trace_attrs.get(self.amount_source)
        if label in (None, MISSING) or amount is None:
            return 0.0
        return self.rates[str(label)] * float(amount)


@dataclass(frozen=True)
class PaymentCreditsTerm:
    """Credits for a full payment, scheduled by the time bucket it lands in.

    ``schedule`` lists (max_bucket, credits) pairs in increasing bucket order;
    a full payment in a later bucket earns ``late_credits``.
    """

    schedule: tuple[tuple[int, float], ...]
    late_credits: float
    bucket_feature: str
    pay_feature: str = "payType"
    attenuated: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "schedule", tuple((int(b), float(c)) for b, c in self.schedule))

    def credits_for_bucket(self, bucket: int) -> float:
        for max_bucket, credits in self.schedule:
            if bucket <= max_bucket:
                return credits
        return self.late_credits

    def contribution(self, event: AnnotatedEvent, trace_attrs: Mapping[str, Scalar],
                     durations: Mapping[str, float] | None) -> float:
        if event.derived.get(self.pay_feature) != "full":
            return 0.0
        bucket = event.derived.get(self.bucket_feature)
        if bucket is None:
            return 0.0
        return self.credits_for_bucket(int(bucket))


@dataclass(frozen=True)
class EventPenaltyTerm:
    """Flat penalty (or bonus) whenever one of the listed activities occurs."""

    activities: frozenset[str]
    value: float
    attenuated: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "activities", frozenset(self.activities))

    def contribution(self, event: AnnotatedEvent, trace_attrs: Mapping[str, Scalar],
                     durations: Mapping[str, float] | None) -> float:
        return self.value if event.activity in self.activities else 0.0


RewardTerm = ActivityCostTerm | AcceptanceInterestTerm | PaymentCreditsTerm | EventPenaltyTerm


@dataclass(frozen=True)
class RewardSpec:
    """Ordered reward terms whose event-wise sum reproduces the trace KPI."""

    terms: tuple[RewardTerm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))

    def event_terms(self, event: AnnotatedEvent, trace_attrs: Mapping[str, Scalar],
                    durations: Mapping[str, float] | None) -> tuple[float, ...]:
        return tuple(t.contribution(event, trace_attrs, durations) for t in self.terms)


# ---------------------------------------------------------------------------
# The scenario spec itself


@dataclass(frozen=True)
class ScenarioSpec:
    scenario_id: str
    agent_activities: frozenset[str]
    env_activities: frozenset[str]
    hf_rules: tuple[HistoryRule, ...]
    ef_rules: tuple[AmountClassRule, ...]
    reward: RewardSpec
    excluded_activities: frozenset[str] = frozenset()
    action_bucket_feature: str | None = None
    payment: PaymentRule | None = None
    success_activities: frozenset[str] = frozenset()
    duration_table: Mapping[str, float] | None = None
    duration_cap_hours: float = 8.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "agent_activities", frozenset(self.agent_activities))
        object.__setattr__(self, "env_activities", frozenset(self.env_activities))
        object.__setattr__(self, "excluded_activities", frozenset(self.excluded_activities))
        object.__setattr__(self, "success_activities", frozenset(self.success_activities))
        object.__setattr__(self, "hf_rules", tuple(self.hf_rules))
        object.__setattr__(self, "ef_rules", tuple(self.ef_rules))
        if self.duration_table is not None:
            object.__setattr__(self, "duration_table", dict(self.duration_table))
        overlap = self.agent_activities & self.env_activities
        if overlap:
            raise ScenarioError(f"activities classified as both agent and environment: {sorted(overlap)}")

    @property
    def hf_names(self) -> tuple[str, ...]:
        return tuple(rule.name for rule in self.hf_rules)

    @property
    def ef_names(self) -> tuple[str, ...]:
        return tuple(rule.name for rule in self.ef_rules)

    def classify(self, activity: str) -> Actor:
        if activity in self.agent_activities:
            return Actor.AGENT
        if activity in self.env_activities:
            return Actor.ENVIRONMENT
        raise ScenarioError(
            f"scenario {self.scenario_id!r} does not classify activity {activity!r}"
        )

    def action_label(self, event: AnnotatedEvent) -> str:
        """MDP action label for an agent event, with the optional time-bucket suffix."""
        if self.action_bucket_feature is None:
            return event.activity
        bucket = event.derived.get(self.action_bucket_feature)
        return f"{event.activity}-{bucket}"

    def calibrate(self, log: EventLog) -> "ScenarioSpec":
        """Return a copy carrying per-activity average durations estimated from ``log``."""
        return replace(self, duration_table=estimate_durations(log, self.duration_cap_hours))

    def needs_durations(self) -> bool:
        return any(isinstance(t, ActivityCostTerm) for t in self.reward.terms)

    def kpi(self, trace: AnnotatedTrace) -> float:
        """KPI of a completed execution: the sum of all reward-term contributions."""
        if not trace.complete:
            raise KpiUndefinedError(f"trace {trace.case_id!r} is an ongoing execution; KPI undefined")
        total = 0.0
        for event in trace.events:
            total += sum(self.reward.event_terms(event, trace.trace_attrs, self.duration_table))
        return total

    def is_success(self, trace: AnnotatedTrace) -> bool:
        """Did the execution reach its positive outcome (offer accepted /
        fully paid)?  With a payment rule, success means a full payment;
        otherwise any success activity counts."""
        if self.payment is not None:
            feature = self.payment.feature_name
            return any(e.derived.get(feature) == "full" for e in trace.events)
        return any(e.activity in self.success_activities for e in trace.events)


def estimate_durations(log: EventLog, cap_hours: float = 8.0) -> dict[str, float]:
    """Average hours from each event to the next one in its trace, capped to
    suppress idle gaps. Activities only ever observed last in a trace get 0."""
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for trace in log:
        for event, nxt in zip(trace.events, trace.events[1:]):
            delta = (nxt.timestamp - event.timestamp).total_seconds() / 3600.0
            delta = min(delta, cap_hours)
            sums[event.activity] = sums.get(event.activity, 0.0) + delta
            counts[event.activity] = counts.get(event.activity, 0) + 1
    return {a: sums[a] / counts[a] for a in sorted(sums)}


# ---------------------------------------------------------------------------
# Serialization

_RULE_TYPES: dict[str, type] = {
    "counter": CounterRule,
    "time_bucket": TimeBucketRule,
    "amount_class": AmountClassRule,
}
_TERM_TYPES: dict[str, type] = {
    "activity_cost": ActivityCostTerm,
    "acceptance_interest": AcceptanceInterestTerm,
    "payment_credits": PaymentCreditsTerm,
    "event_penalty": EventPenaltyTerm,
}


def _tag_for(obj: Any, registry: Mapping[str, type]) -> str:
    for tag, cls in registry.items():
        if type(obj) is cls:
            return tag
    raise ScenarioError(f"cannot serialize {type(obj).__name__}")


def _plain(value: Any) -> Any:
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in sorted(value.items())}
    return value


def _dataclass_dict(obj: Any) -> dict[str, Any]:
    return {f: _plain(getattr(obj, f)) for f in obj.__dataclass_fields__}


def spec_to_dict(spec: ScenarioSpec) -> dict[str, Any]:
    return {
        "scenario_id": spec.scenario_id,
        "agent_activities": sorted(spec.agent_activities),
        "env_activities": sorted(spec.env_activities),
        "excluded_activities": sorted(spec.excluded_activities),
        "success_activities": sorted(spec.success_activities),
        "action_bucket_feature": spec.action_bucket_feature,
        "hf_rules": [{"type": _tag_for(r, _RULE_TYPES), **_dataclass_dict(r)} for r in spec.hf_rules],
        "ef_rules": [{"type": _tag_for(r, _RULE_TYPES), **_dataclass_dict(r)} for r in spec.ef_rules],
        "payment": _dataclass_dict(spec.payment) if spec.payment else None,
        "reward_terms": [{"type": _tag_for(t, _TERM_TYPES), **_dataclass_dict(t)}
                         for t in spec.reward.terms],
        "duration_table": _plain(spec.duration_table) if spec.duration_table is not None else None,
        "duration_cap_hours": spec.duration_cap_hours,
    }


def _build(cls: type, data: Mapping[str, Any]) -> Any:
    kwargs = {k: v for k, v in data.items() if k != "type"}
    hints = {f.name: f for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    for key, value in list(kwargs.items()):
        if key not in hints:
            raise ScenarioError(f"{cls.__name__}: unknown field {key!r}")
        if isinstance(value, list):
            if all(isinstance(v, list) for v in value):
                kwargs[key] = tuple(tuple(v) for v in value)
            elif hints[key].type.startswith("frozenset") or key.endswith("activities") or key == "after":
                kwargs[key] = frozenset(value)
            else:
                kwargs[key] = tuple(value)
    return cls(**kwargs)


def spec_from_dict(data: Mapping[str, Any]) -> ScenarioSpec:
    def rule(entry: Mapping[str, Any]) -> Any:
        return _build(_RULE_TYPES[entry["type"]], entry)

    def term(entry: Mapping[str, Any]) -> Any:
        return _build(_TERM_TYPES[entry["type"]], entry)

    return ScenarioSpec(
        scenario_id=data["scenario_id"],
        agent_activities=frozenset(data["agent_activities"]),
        env_activities=frozenset(data["env_activities"]),
        excluded_activities=frozenset(data.get("excluded_activities", [])),
        success_activities=frozenset(data.get("success_activities", [])),
        action_bucket_feature=data.get("action_bucket_feature"),
        hf_rules=tuple(rule(r) for r in data["hf_rules"]),
        ef_rules=tuple(rule(r) for r in data["ef_rules"]),
        payment=_build(PaymentRule, data["payment"]) if data.get("payment") else None,
        reward=RewardSpec(tuple(term(t) for t in data["reward_terms"])),
        duration_table=data.get("duration_table"),
        duration_cap_hours=data.get("duration_cap_hours", 8.0),
    )


def save_spec(spec: ScenarioSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(spec_to_dict(spec), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_spec(path: str) -> ScenarioSpec:
    with open(path, encoding="utf-8") as handle:
        return spec_from_dict(json.load(handle))
