"""Enrich event logs with actor tags and derived state features."""
from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin

from ..log.model import (
    Actor,
    AnnotatedEvent,
    AnnotatedLog,
    AnnotatedTrace,
    Event,
    EventLog,
    Scalar,
    Trace,
)
from .spec import AmountClassRule, CounterRule, ScenarioSpec, TimeBucketRule


class AnnotationError(ValueError):
    pass


def annotate_events(events: tuple[Event, ...], trace_attrs: dict[str, Scalar],
                    spec: ScenarioSpec) -> tuple[AnnotatedEvent, ...]:
    """Tag each event with its actor and the feature values holding after it."""
    if not events:
        return ()
    t0 = events[0].timestamp
    counters = {rule.name: 0 for rule in spec.hf_rules if isinstance(rule, CounterRule)}
    armed = {rule.name: not rule.after for rule in spec.hf_rules if isinstance(rule, CounterRule)}
    latest: dict[str, Scalar] = {}
    paid_total = 0.0

    annotated = []
    for event in events:
        try:
            actor = spec.classify(event.activity)
        except Exception as exc:
            raise AnnotationError(str(exc)) from None
        for key, value in event.payload.items():
            latest[key] = value

        derived: dict[str, Scalar | None] = {}
        for rule in spec.hf_rules:
            if isinstance(rule, TimeBucketRule):
                days = (event.timestamp - t0).total_seconds() / 86400.0
                derived[rule.name] = int(days // rule.bucket_days)
            else:
                if event.activity in rule.activities and armed[rule.name]:
                    counters[rule.name] += 1
                derived[rule.name] = min(counters[rule.name], 1) if rule.boolean else counters[rule.name]
                if event.activity in rule.after:
                    armed[rule.name] = True
        for rule in spec.ef_rules:
            source = trace_attrs if rule.from_trace else latest
            raw = source.get(rule.source)
            derived[rule.name] = rule.classify(float(raw) if raw is not None else None)
        if spec.payment is not None:
            derived[spec.payment.feature_name] = _pay_type(event, spec, latest, paid_total)
            if derived[spec.payment.feature_name] in ("partial", "full"):
                paid = event.payload.get(spec.payment.paid_attr) if spec.payment.paid_attr else None
                owed = latest.get(spec.payment.owed_source)
                paid_total += float(paid) if paid is not None else float(owed or 0.0)
        annotated.append(AnnotatedEvent(event, actor, derived))
    return tuple(annotated)


def _pay_type(event: Event, spec: ScenarioSpec, latest: dict[str, Scalar],
              paid_before: float) -> str | None:
    rule = spec.payment
    assert rule is not None
    if event.activity in rule.appeal_activities:
        return "appeal"
    if event.activity not in rule.payment_activities:
        return None
    owed = latest.get(rule.owed_source)
    paid = event.payload.get(rule.paid_attr) if rule.paid_attr else None
    if owed is None:
        return "full" if paid is None else "partial"
    amount = float(paid) if paid is not None else float(owed)
    return "full" if paid_before + amount >= float(owed) else "partial"


def annotate_trace(trace: Trace, spec: ScenarioSpec, complete: bool = True) -> AnnotatedTrace:
    events = annotate_events(trace.events, dict(trace.trace_attrs), spec)
    return AnnotatedTrace(trace.case_id, events, trace.trace_attrs, complete=complete)


def annotate(log: EventLog, spec: ScenarioSpec) -> AnnotatedLog:
    """Annotate every trace; fails if the scenario leaves any activity unclassified."""
    return AnnotatedLog(tuple(annotate_trace(t, spec) for t in log), spec.scenario_id)


def state_components(event: AnnotatedEvent, spec: ScenarioSpec) -> tuple[str, tuple, tuple]:
    """(last activity, history features, environment features) after this event."""
    hf = tuple(event.derived[name] for name in spec.hf_names)
    ef = tuple(event.derived[name] for name in spec.ef_names)
    return event.activity, hf, ef


class ScenarioAnnotator(TransformerMixin, BaseEstimator):
    """Transformer wrapping :func:`annotate` for pipeline composition."""

    def __init__(self, spec: ScenarioSpec | None = None):
        self.spec = spec

    def fit(self, log: EventLog, y=None):
        if self.spec is None:
            raise AnnotationError("ScenarioAnnotator needs a scenario spec")
        return self

    def transform(self, log: EventLog) -> AnnotatedLog:
        if self.spec is None:
            raise AnnotationError("ScenarioAnnotator needs a scenario spec")
        return annotate(log, self.spec)
