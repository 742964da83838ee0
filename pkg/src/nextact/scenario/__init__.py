"""Scenario definitions: actor split, derived features, and reward terms."""
from .spec import (
    KpiUndefinedError,
    MissingDurationsError,
    ScenarioError,
    ScenarioSpec,
    estimate_durations,
    load_spec,
    save_spec,
    spec_from_dict,
    spec_to_dict,
)
from .builtin import builtin_spec, bundled_spec, fines_spec, loans_spec, resolve_spec
from .annotate import AnnotationError, ScenarioAnnotator, annotate, annotate_trace
from .synthetic import synthetic_fines_log, synthetic_loans_log, synthetic_log

__all__ = [
    "AnnotationError", "KpiUndefinedError", "MissingDurationsError",
    "ScenarioAnnotator", "ScenarioError", "ScenarioSpec", "annotate",
    "annotate_trace", "builtin_spec", "bundled_spec", "estimate_durations",
    "fines_spec", "load_spec", "loans_spec", "resolve_spec", "save_spec",
    "spec_from_dict", "spec_to_dict", "synthetic_fines_log", "synthetic_log",
    "synthetic_loans_log",
]
