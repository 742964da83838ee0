"""Policy evaluation: MDP simulation and held-out test-log analysis."""
from .simulation import (
    DEFAULT_N_CASES,
    CompatibilityError,
    SimReport,
    compare_policies,
    project_action,
    simulate_policy,
)
from .testlog import (
    Rq1Report,
    Rq1Row,
    Rq2Report,
    Rq2Row,
    follows_policy,
    rq1_report,
    rq2_prefix_analysis,
)
from .tables import format_rq1_table, format_rq2_table, format_sim_table

__all__ = [
    "DEFAULT_N_CASES", "CompatibilityError", "Rq1Report", "Rq1Row",
    "Rq2Report", "Rq2Row", "SimReport", "compare_policies", "follows_policy",
    "format_rq1_table", "format_rq2_table", "format_sim_table",
    "project_action", "rq1_report", "rq2_prefix_analysis", "simulate_policy",
]
