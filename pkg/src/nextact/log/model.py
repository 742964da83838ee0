"""Data model for process event logs: events, traces, logs and their annotated forms."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Iterator, Mapping

Scalar = str | int | float | bool

SCALAR_TYPES = ("string", "integer", "decimal", "boolean")


class Actor(str, Enum):
    """Who performed an event: the actor we optimize for, or everyone else."""

    AGENT = "agent"
    ENVIRONMENT = "environment"


def to_utc(ts: datetime) -> datetime:
    """Normalize a timestamp to UTC with millisecond precision (naive = UTC)."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    ts = ts.astimezone(timezone.utc)
    return ts.replace(microsecond=(ts.microsecond // 1000) * 1000)


@dataclass(frozen=True)
class Event:
    activity: str
    timestamp: datetime
    payload: Mapping[str, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.activity:
            raise ValueError("event activity must be non-empty")
        object.__setattr__(self, "timestamp", to_utc(self.timestamp))
        object.__setattr__(self, "payload", dict(self.payload))


@dataclass(frozen=True)
class Trace:
    case_id: str
    events: tuple[Event, ...]
    trace_attrs: Mapping[str, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.events:
            raise ValueError(f"trace {self.case_id!r} has no events")
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "trace_attrs", dict(self.trace_attrs))
        times = [e.timestamp for e in self.events]
        if any(a > b for a, b in zip(times, times[1:])):
            raise ValueError(f"trace {self.case_id!r} events not sorted by timestamp")

    def __len__(self) -> int:
        return len(self.events)

    @property
    def variant(self) -> tuple[str, ...]:
        """The activity-label sequence of the trace."""
        return tuple(e.activity for e in self.events)


@dataclass(frozen=True)
class EventLog:
    traces: tuple[Trace, ...]
    schema: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "traces", tuple(self.traces))
        object.__setattr__(self, "schema", dict(self.schema))
        seen: set[str] = set()
        for trace in self.traces:
            if trace.case_id in seen:
                raise ValueError(f"duplicate case_id {trace.case_id!r}")
            seen.add(trace.case_id)
        for name, kind in self.schema.items():
            if kind not in SCALAR_TYPES:
                raise ValueError(f"schema attribute {name!r} has unknown type {kind!r}")
        known = set(self.schema)
        for trace in self.traces:
            for event in trace.events:
                unknown = set(event.payload) - known
                if unknown:
                    raise ValueError(
                        f"trace {trace.case_id!r} event {event.activity!r} has payload "
                        f"attributes not in schema: {sorted(unknown)}"
                    )

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces)

    @property
    def n_events(self) -> int:
        return sum(len(t) for t in self.traces)


@dataclass(frozen=True)
class AnnotatedEvent:
    """An event tagged with its actor and the derived features valid just after it."""

    base: Event
    actor: Actor
    derived: Mapping[str, Scalar | None] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "derived", dict(self.derived))

    @property
    def activity(self) -> str:
        return self.base.activity

    @property
    def timestamp(self) -> datetime:
        return self.base.timestamp


@dataclass(frozen=True)
class AnnotatedTrace:
    case_id: str
    events: tuple[AnnotatedEvent, ...]
    trace_attrs: Mapping[str, Scalar] = field(default_factory=dict)
    complete: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "trace_attrs", dict(self.trace_attrs))

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class AnnotatedLog:
    traces: tuple[AnnotatedTrace, ...]
    scenario_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "traces", tuple(self.traces))

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[AnnotatedTrace]:
        return iter(self.traces)


def with_events(trace: Trace, events: tuple[Event, ...]) -> Trace:
    return replace(trace, events=events)
