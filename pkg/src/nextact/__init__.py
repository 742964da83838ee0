"""nextact: learn which activity to do next from historical event logs.

The pipeline: parse a CSV event log, annotate it with scenario features,
compile it into a Markov decision process by replaying the traces, train a
next-activity policy with Monte Carlo policy iteration, then evaluate the
policy by simulation or against a held-out test log and serve it over HTTP.
"""
from .log.model import (
    Actor,
    AnnotatedEvent,
    AnnotatedLog,
    AnnotatedTrace,
    Event,
    EventLog,
    Trace,
)
from .log.csvio import ColumnMapping, LogParseError, LogSchemaError, load_log_file, parse_log
from .log.ops import ActivityFilter, VariantFilter, drop_activities, filter_variants, split_log
from .scenario.spec import ScenarioSpec, load_spec, save_spec
from .scenario.builtin import builtin_spec, fines_spec, loans_spec, resolve_spec
from .scenario.annotate import ScenarioAnnotator, annotate, annotate_trace
from .scenario.synthetic import synthetic_fines_log, synthetic_loans_log, synthetic_log
from .mdp.model import Action, Edge, Mdp, State
from .mdp.build import MdpBuilder, build_mdp, mdp_stats, reliability_coefficient
from .mdp.io import load_mdp, mdp_to_dot, save_mdp
from .rl.policy import Policy, QTable, customary_policy, random_policy
from .rl.montecarlo import MonteCarloPolicyIteration, policy_iteration
from .rl.exact import exact_policy_iteration, exact_state_values
from .evaluate.simulation import SimReport, compare_policies, simulate_policy
from .evaluate.testlog import rq1_report, rq2_prefix_analysis

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActivityFilter",
    "Actor",
    "AnnotatedEvent",
    "AnnotatedLog",
    "AnnotatedTrace",
    "ColumnMapping",
    "Edge",
    "Event",
    "EventLog",
    "LogParseError",
    "LogSchemaError",
    "Mdp",
    "MdpBuilder",
    "MonteCarloPolicyIteration",
    "Policy",
    "QTable",
    "ScenarioAnnotator",
    "ScenarioSpec",
    "SimReport",
    "State",
    "Trace",
    "VariantFilter",
    "annotate",
    "annotate_trace",
    "build_mdp",
    "builtin_spec",
    "compare_policies",
    "customary_policy",
    "drop_activities",
    "exact_policy_iteration",
    "exact_state_values",
    "filter_variants",
    "fines_spec",
    "load_log_file",
    "load_mdp",
    "load_spec",
    "loans_spec",
    "mdp_stats",
    "mdp_to_dot",
    "parse_log",
    "policy_iteration",
    "random_policy",
    "reliability_coefficient",
    "resolve_spec",
    "rq1_report",
    "rq2_prefix_analysis",
    "save_mdp",
    "save_spec",
    "simulate_policy",
    "split_log",
    "synthetic_fines_log",
    "synthetic_log",
    "synthetic_loans_log",
    "__version__",
]
