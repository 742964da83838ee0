"""Shared constructors for the test suite.

Provides the hand-checked reference fine trace (used to pin annotation,
replay, and service behaviour), small handcrafted MDPs with known exact
values, and a seeded generator of random layered MDPs for comparing the
Monte Carlo learner against the exact solver.
"""
from __future__ import annotations

import contextlib
import io
from datetime import datetime, timezone

import numpy as np

from nextact.cli import main as cli_main
from nextact.log.model import Event, EventLog, Trace
from nextact.mdp.model import START_STATE, Edge, Mdp, State

__all__ = [
    "ts",
    "reference_fine_trace",
    "reference_fine_log",
    "REFERENCE_STATES",
    "REFERENCE_ACTIONS",
    "chain_mdp",
    "branch_mdp",
    "random_layer_mdp",
    "run_cli",
]


def ts(year: int, month: int, day: int, hour: int = 9, minute: int = 0) -> datetime:
    return datetime(year, month, day, hour, minute, tzinfo=timezone.utc)


def reference_fine_trace(case_id: str = "F00001") -> Trace:
    """Fine handled in four steps: created, sent, penalized, finally paid.

    Day offsets from creation are 0, 11, 64, and 193, so the 60-day time
    buckets are 0, 0, 1, 3; the amount crosses the 50-unit class bound
    when the penalty raises it from 40 to 60.
    """
    return Trace(
        case_id=case_id,
        events=(
            Event("Create fine", ts(2021, 1, 13), {"amount": 40.0}),
            Event("Send fine", ts(2021, 1, 24)),
            Event("Add penalty", ts(2021, 3, 18), {"amount": 60.0}),
            Event("Payment", ts(2021, 7, 25)),
        ),
    )


def reference_fine_log() -> EventLog:
    return EventLog((reference_fine_trace(),), {"amount": "decimal"})


REFERENCE_STATES = {
    "start": START_STATE,
    "created": State("Create fine", (0,), ("low",)),
    "sent": State("Send fine", (0,), ("low",)),
    "paid": State("Payment", (3,), ("high",), terminal=True),
}

REFERENCE_ACTIONS = ("Add penalty-1", "Create fine-0", "Send fine-0")


def chain_mdp(gamma: float = 1.0) -> Mdp:
    """Deterministic two-decision chain A -> B -> T with rewards 1 then 2."""
    a, b = State("A"), State("B")
    t = State("T", terminal=True)
    edges = (
        Edge(a, "go", b, 1.0, 1.0, 4),
        Edge(b, "go", t, 1.0, 2.0, 4),
    )
    meta = {"max_decisions": 2, "success_las": ["T"]}
    return Mdp(states=(a, b, t), edges=edges, initial={a: 1.0}, gamma=gamma, meta=meta)


def branch_mdp() -> Mdp:
    """One decision state with a sure action and a risky one.

    Action "sure" always pays 10; action "risky" pays 0 with probability
    0.4 and 5 with probability 0.6, so its expected value is 3.
    """
    a = State("A")
    t1, t2 = State("T1", terminal=True), State("T2", terminal=True)
    edges = (
        Edge(a, "sure", t1, 1.0, 10.0, 5),
        Edge(a, "risky", t1, 0.4, 0.0, 2),
        Edge(a, "risky", t2, 0.6, 5.0, 3),
    )
    meta = {"max_decisions": 1, "success_las": ["T2"]}
    return Mdp(states=(a, t1, t2), edges=edges, initial={a: 1.0}, gamma=1.0, meta=meta)


def random_layer_mdp(rng: np.random.Generator) -> Mdp:
    """Random layered MDP: every action leads strictly forward, so episodes
    always terminate and the exact solver's linear system is well posed.

    Bounded at 20 states and 5 actions; rewards are positive so value
    comparisons at the initial distribution are numerically meaningful.
    """
    n_layers = int(rng.integers(2, 4))
    layers: list[list[State]] = [
        [State(f"L{li}S{k}") for k in range(int(rng.integers(1, 4)))]
        for li in range(n_layers)
    ]
    layers.append([State(f"T{k}", terminal=True) for k in range(int(rng.integers(1, 3)))])
    action_names = [f"a{k}" for k in range(int(rng.integers(2, 6)))]

    edges: list[Edge] = []
    for li, layer in enumerate(layers[:-1]):
        pool = [state for later in layers[li + 1:] for state in later]
        for source in layer:
            k_actions = int(rng.integers(1, min(3, len(action_names)) + 1))
            chosen = rng.choice(len(action_names), size=k_actions, replace=False)
            for ai in sorted(int(x) for x in chosen):
                n_targets = int(rng.integers(1, min(3, len(pool)) + 1))
                target_idx = rng.choice(len(pool), size=n_targets, replace=False)
                counts = [int(c) for c in rng.integers(1, 20, size=n_targets)]
                total = sum(counts)
                for t_i, count in zip(target_idx, counts):
                    edges.append(Edge(
                        source=source,
                        action=action_names[ai],
                        target=pool[int(t_i)],
                        probability=count / total,
                        reward=float(np.round(rng.uniform(0.5, 5.0), 3)),
                        count=count,
                    ))

    weights = [int(w) for w in rng.integers(1, 10, size=len(layers[0]))]
    total_w = sum(weights)
    initial = {state: w / total_w for state, w in zip(layers[0], weights)}
    meta = {
        "max_decisions": len(layers) - 1,
        "success_las": [layers[-1][0].la],
    }
    mdp = Mdp(
        states=tuple(s for layer in layers for s in layer),
        edges=tuple(edges),
        initial=initial,
        gamma=1.0,
        meta=meta,
    )
    mdp.validate()
    return mdp


def run_cli(*argv: str) -> tuple[int, str, str]:
    """Run the command line entry point in process, capturing output."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli_main(list(argv))
    return code, out.getvalue(), err.getvalue()
