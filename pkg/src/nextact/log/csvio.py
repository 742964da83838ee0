"""CSV reading and writing for event logs.

Expected input: a header row naming at least the case id, activity and timestamp
columns; every remaining mapped column becomes an event payload attribute or a
trace attribute. Timestamps are ISO-8601 by default, with an optional strptime
format string for legacy exports.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Mapping

from .model import Event, EventLog, Scalar, Trace, to_utc


class LogParseError(ValueError):
    """Malformed cell content; carries the offending row number."""


class LogSchemaError(ValueError):
    """Header is missing a mandatory column or a mapping is inconsistent."""


@dataclass(frozen=True)
class ColumnMapping:
    """Assigns roles to CSV columns.

    ``event_attrs`` and ``trace_attrs`` map column names to scalar types
    (``string``, ``integer``, ``decimal``, ``boolean``). Unmapped columns are
    ignored.
    """

    case_id: str = "case_id"
    activity: str = "activity"
    timestamp: str = "timestamp"
    timestamp_format: str | None = None
    event_attrs: Mapping[str, str] = field(default_factory=dict)
    trace_attrs: Mapping[str, str] = field(default_factory=dict)
    delimiter: str = ","

    def __post_init__(self) -> None:
        object.__setattr__(self, "event_attrs", dict(self.event_attrs))
        object.__setattr__(self, "trace_attrs", dict(self.trace_attrs))
        overlap = set(self.event_attrs) & set(self.trace_attrs)
        if overlap:
            raise LogSchemaError(f"columns mapped as both event and trace attrs: {sorted(overlap)}")


def _parse_scalar(text: str, kind: str, column: str, row: int) -> Scalar:
    try:
        if kind == "string":
            return text
        if kind == "integer":
            return int(text)
        if kind == "decimal":
            return float(text)
        if kind == "boolean":
            lowered = text.strip().lower()
            if lowered in ("true", "1", "yes"):
                return True
            if lowered in ("false", "0", "no"):
                return False
            raise ValueError(text)
    except ValueError:
        raise LogParseError(f"row {row}: cannot parse {column}={text!r} as {kind}") from None
    raise LogSchemaError(f"unknown scalar type {kind!r} for column {column!r}")


def _parse_timestamp(text: str, fmt: str | None, row: int) -> datetime:
    try:
        if fmt is not None:
            return datetime.strptime(text, fmt)
        return datetime.fromisoformat(text)
    except ValueError:
        raise LogParseError(f"row {row}: malformed timestamp {text!r}") from None


def parse_log(source: IO[str] | str, mapping: ColumnMapping | None = None) -> EventLog:
    """Parse a character stream (or string) of CSV rows into an event log.

    Rows are grouped by case id and each trace's events are sorted by
    timestamp, keeping input order on ties. The total number of events equals
    the number of data rows.
    """
    mapping = mapping or ColumnMapping()
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.DictReader(stream, delimiter=mapping.delimiter)
    header = reader.fieldnames or []
    for required in (mapping.case_id, mapping.activity, mapping.timestamp):
        if required not in header:
            raise LogSchemaError(f"missing mandatory column {required!r} (header: {header})")
    for column in list(mapping.event_attrs) + list(mapping.trace_attrs):
        if column not in header:
            raise LogSchemaError(f"mapped column {column!r} not in header {header}")

    order: list[str] = []
    events_by_case: dict[str, list[tuple[datetime, int, Event]]] = {}
    attrs_by_case: dict[str, dict[str, Scalar]] = {}
    n_rows = 0
    for i, row in enumerate(reader):
        rownum = i + 2  # 1-based, after the header
        n_rows += 1
        case = row[mapping.case_id]
        activity = row[mapping.activity]
        if not activity:
            raise LogParseError(f"row {rownum}: empty activity")
        ts = _parse_timestamp(row[mapping.timestamp], mapping.timestamp_format, rownum)
        payload: dict[str, Scalar] = {}
        for column, kind in mapping.event_attrs.items():
            cell = row.get(column)
            if cell:
                payload[column] = _parse_scalar(cell, kind, column, rownum)
        if case not in events_by_case:
            order.append(case)
            events_by_case[case] = []
            attrs_by_case[case] = {}
        for column, kind in mapping.trace_attrs.items():
            cell = row.get(column)
            if cell and column not in attrs_by_case[case]:
                attrs_by_case[case][column] = _parse_scalar(cell, kind, column, rownum)
        events_by_case[case].append((to_utc(ts), i, Event(activity, ts, payload)))

    traces = []
    for case in order:
        rows = sorted(events_by_case[case], key=lambda item: (item[0], item[1]))
        traces.append(Trace(case, tuple(e for _, _, e in rows), attrs_by_case[case]))
    schema = {**mapping.event_attrs}
    log = EventLog(tuple(traces), schema)
    assert log.n_events == n_rows
    return log


def _format_scalar(value: Scalar) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_log(log: EventLog, sink: IO[str], mapping: ColumnMapping | None = None) -> None:
    """Write a log back to CSV, inverse of :func:`parse_log` for the same mapping."""
    mapping = mapping or ColumnMapping(
        event_attrs={name: kind for name, kind in log.schema.items()},
    )
    columns = [mapping.case_id, mapping.activity, mapping.timestamp]
    columns += list(mapping.event_attrs) + list(mapping.trace_attrs)
    writer = csv.DictWriter(sink, fieldnames=columns, delimiter=mapping.delimiter)
    writer.writeheader()
    for trace in log:
        for event in trace.events:
            if mapping.timestamp_format is not None:
                stamp = event.timestamp.strftime(mapping.timestamp_format)
            else:
                stamp = event.timestamp.astimezone(timezone.utc).isoformat()
            row = {mapping.case_id: trace.case_id, mapping.activity: event.activity,
                   mapping.timestamp: stamp}
            for column in mapping.event_attrs:
                if column in event.payload:
                    row[column] = _format_scalar(event.payload[column])
            for column in mapping.trace_attrs:
                if column in trace.trace_attrs:
                    row[column] = _format_scalar(trace.trace_attrs[column])
            writer.writerow(row)


def dump_log(log: EventLog, mapping: ColumnMapping | None = None) -> str:
    sink = io.StringIO()
    serialize_log(log, sink, mapping)
    return sink.getvalue()


def load_log_file(path: str, mapping: ColumnMapping | None = None) -> EventLog:
    with open(path, newline="", encoding="utf-8") as handle:
        return parse_log(handle, mapping)
