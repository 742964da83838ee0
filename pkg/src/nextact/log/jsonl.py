"""Line-delimited JSON persistence for annotated logs.

First line: a header record with the format tag and the scenario id.  Every
following line is one trace with its actor-tagged, feature-annotated events.
"""
from __future__ import annotations

import json
from datetime import datetime
from pathlib import Path
from typing import Iterator

from .model import Actor, AnnotatedEvent, AnnotatedLog, AnnotatedTrace, Event

JSONL_FORMAT = "nextact-annotated-log"
JSONL_VERSION = 1


class JsonlError(ValueError):
    pass


def _event_record(event: AnnotatedEvent) -> dict:
    return {
        "activity": event.base.activity,
        "timestamp": event.base.timestamp.isoformat(),
        "payload": dict(sorted(event.base.payload.items())),
        "actor": event.actor.value,
        "derived": dict(sorted(event.derived.items())),
    }


def _trace_record(trace: AnnotatedTrace) -> dict:
    return {
        "case_id": trace.case_id,
        "trace_attrs": dict(sorted(trace.trace_attrs.items())),
        "complete": trace.complete,
        "events": [_event_record(e) for e in trace.events],
    }


def dump_annotated(log: AnnotatedLog, path: str | Path) -> None:
    header = {"format": JSONL_FORMAT, "version": JSONL_VERSION,
              "scenario_id": log.scenario_id, "n_traces": len(log)}
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(header, sort_keys=True) + "\n")
        for trace in log:
            handle.write(json.dumps(_trace_record(trace), sort_keys=True) + "\n")


def _parse_event(record: dict, line_no: int) -> AnnotatedEvent:
    try:
        base = Event(
            activity=record["activity"],
            timestamp=datetime.fromisoformat(record["timestamp"]),
            payload=record.get("payload", {}),
        )
        return AnnotatedEvent(base=base, actor=Actor(record["actor"]),
                              derived=record.get("derived", {}))
    except (KeyError, ValueError) as exc:
        raise JsonlError(f"line {line_no}: bad event record: {exc}") from exc


def _iter_records(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                raise JsonlError(f"line {line_no}: not valid JSON: {exc}") from exc


def load_annotated(path: str | Path) -> AnnotatedLog:
    path = Path(path)
    records = _iter_records(path)
    try:
        _, header = next(records)
    except StopIteration:
        raise JsonlError(f"{path}: empty annotated-log file") from None
    if header.get("format") != JSONL_FORMAT:
        raise JsonlError(f"{path}: not an annotated-log file "
                         f"(format {header.get('format')!r})")
    if header.get("version") != JSONL_VERSION:
        raise JsonlError(f"{path}: unsupported version {header.get('version')!r}")
    traces = []
    for line_no, record in records:
        try:
            traces.append(AnnotatedTrace(
                case_id=record["case_id"],
                events=tuple(_parse_event(e, line_no) for e in record["events"]),
                trace_attrs=record.get("trace_attrs", {}),
                complete=bool(record.get("complete", True)),
            ))
        except KeyError as exc:
            raise JsonlError(f"line {line_no}: trace record missing {exc}") from exc
    return AnnotatedLog(traces=tuple(traces), scenario_id=header.get("scenario_id", ""))
