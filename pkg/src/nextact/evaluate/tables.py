"""Aligned plain-text tables for evaluation reports."""
from __future__ import annotations

from typing import Sequence

from .simulation import SimReport
from .testlog import Rq1Report, Rq2Report


def _render(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def line(cells: Sequence[str]) -> str:
        return "  ".join(cell.rjust(widths[i]) if i else cell.ljust(widths[i])
                         for i, cell in enumerate(cells))
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(row) for row in rows)
    return "\n".join(out) + "\n"


def _num(value: float | None, digits: int = 4) -> str:
    return "-" if value is None else f"{value + 0.0:.{digits}f}"  # +0.0 drops the sign of -0.0


def format_sim_table(reports: Sequence[SimReport]) -> str:
    headers = ["policy", "avg KPI", "std err", "outcome rate", "cases", "fallbacks"]
    rows = [
        [r.policy_kind, _num(r.avg_kpi), _num(r.std_error), _num(r.outcome_rate),
         str(r.n_cases), str(r.fallback_decisions)]
        for r in reports
    ]
    return _render(headers, rows)


def format_rq1_table(report: Rq1Report) -> str:
    headers = ["partition", "traces", "fraction", "avg KPI", "outcome rate"]
    rows = [
        [row.label, str(row.trace_count), _num(row.fraction),
         _num(row.avg_kpi), _num(row.outcome_rate)]
        for row in report.rows
    ]
    table = _render(headers, rows)
    if report.n_unreplayable:
        table += f"(unreplayable traces counted as deviating: {report.n_unreplayable})\n"
    return table


def format_rq2_table(report: Rq2Report) -> str:
    headers = ["prefix", "avg delta KPI", "traces", "excluded"]
    rows = [
        [str(row.prefix_len), _num(row.avg_delta_kpi), str(row.trace_count),
         str(row.excluded_count)]
        for row in report.rows
    ]
    return _render(headers, rows)
