"""Event-log data model, CSV round-trip, and log preprocessing."""
from .model import (
    Actor,
    AnnotatedEvent,
    AnnotatedLog,
    AnnotatedTrace,
    Event,
    EventLog,
    Trace,
)
from .csvio import (
    ColumnMapping,
    LogParseError,
    LogSchemaError,
    dump_log,
    load_log_file,
    parse_log,
    serialize_log,
)
from .jsonl import JsonlError, dump_annotated, load_annotated
from .ops import (
    ActivityFilter,
    SplitError,
    VariantFilter,
    drop_activities,
    filter_variants,
    split_log,
    variant_counts,
)

__all__ = [
    "Actor", "AnnotatedEvent", "AnnotatedLog", "AnnotatedTrace", "Event",
    "EventLog", "Trace", "ColumnMapping", "JsonlError", "LogParseError",
    "LogSchemaError", "dump_annotated", "dump_log", "load_annotated",
    "load_log_file", "parse_log", "serialize_log", "ActivityFilter",
    "SplitError", "VariantFilter", "drop_activities", "filter_variants",
    "split_log", "variant_counts",
]
