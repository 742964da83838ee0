"""Log-level operations: variant filtering, activity removal, train/test splitting."""
from __future__ import annotations

from collections import Counter
from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_fraction
from .model import EventLog


def filter_variants(log: EventLog, min_fraction: float = 0.10) -> EventLog:
    """Keep only traces whose variant has relative frequency >= ``min_fraction``.

    The boundary is inclusive: a variant sitting exactly at the threshold stays.
    """
    check_fraction(min_fraction, "min_fraction")
    if not log.traces:
        return log
    counts = Counter(t.variant for t in log)
    total = len(log)
    kept = tuple(t for t in log if counts[t.variant] / total >= min_fraction)
    return EventLog(kept, log.schema)


def drop_activities(log: EventLog, excluded: set[str]) -> EventLog:
    """Remove events whose activity is excluded; traces left empty are dropped."""
    if not excluded:
        return log
    traces = []
    for trace in log:
        events = tuple(e for e in trace.events if e.activity not in excluded)
        if events:
            traces.append(replace(trace, events=events))
    return EventLog(tuple(traces), log.schema)


class SplitError(ValueError):
    pass


def split_log(log: EventLog, train_fraction: float, seed: int) -> tuple[EventLog, EventLog]:
    """Random trace-level partition into (train, test), deterministic per seed.

    ``len(train) == round(train_fraction * len(log))``, clamped so neither side
    is empty.
    """
    check_fraction(train_fraction, "train_fraction", inclusive_low=False, inclusive_high=False)
    n = len(log)
    if n < 2:
        raise SplitError(f"cannot split a log with {n} trace(s)")
    n_train = int(round(train_fraction * n))
    n_train = min(max(n_train, 1), n - 1)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    train_idx = set(order[:n_train].tolist())
    train = tuple(t for i, t in enumerate(log) if i in train_idx)
    test = tuple(t for i, t in enumerate(log) if i not in train_idx)
    return EventLog(train, log.schema), EventLog(test, log.schema)


class VariantFilter(TransformerMixin, BaseEstimator):
    """Transformer that drops low-frequency variants.

    Frequencies are learned in :meth:`fit`, so a filter fitted on one log can
    be applied to another with the same variant statistics.
    """

    def __init__(self, min_fraction: float = 0.10):
        self.min_fraction = min_fraction

    def fit(self, log: EventLog, y=None):
        check_fraction(self.min_fraction, "min_fraction")
        counts = Counter(t.variant for t in log)
        total = max(len(log), 1)
        self.kept_variants_ = frozenset(
            v for v, c in counts.items() if c / total >= self.min_fraction
        )
        return self

    def transform(self, log: EventLog) -> EventLog:
        kept = tuple(t for t in log if t.variant in self.kept_variants_)
        return EventLog(kept, log.schema)


class ActivityFilter(TransformerMixin, BaseEstimator):
    """Stateless transformer that removes a fixed set of activities."""

    def __init__(self, excluded: set[str] = frozenset()):
        self.excluded = excluded

    def fit(self, log: EventLog, y=None):
        return self

    def transform(self, log: EventLog) -> EventLog:
        return drop_activities(log, set(self.excluded))


def longest_trace(log: EventLog) -> int:
    return max((len(t) for t in log), default=0)


def variant_counts(log: EventLog) -> Counter[tuple[str, ...]]:
    return Counter(t.variant for t in log)
