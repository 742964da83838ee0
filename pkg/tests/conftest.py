"""Shared fixtures: scenario specs, synthetic logs, and a full CLI pipeline run."""
from __future__ import annotations

import pytest

import helpers
from nextact.scenario.builtin import fines_spec as build_fines_spec
from nextact.scenario.builtin import loans_spec as build_loans_spec
from nextact.scenario.synthetic import synthetic_fines_log, synthetic_loans_log

# Populated by the acceptance tests; printed after the run so the verdict for
# each criterion is visible even when output capturing is on.
ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def fines_spec():
    return build_fines_spec()


@pytest.fixture(scope="session")
def loans_spec():
    return build_loans_spec()


@pytest.fixture()
def fine_trace():
    return helpers.reference_fine_trace()


@pytest.fixture()
def fine_log():
    return helpers.reference_fine_log()


@pytest.fixture(scope="session")
def fines_log_small():
    return synthetic_fines_log(n_traces=200, seed=0)


@pytest.fixture(scope="session")
def loans_log_small():
    return synthetic_loans_log(n_traces=200, seed=0)


@pytest.fixture(scope="session")
def fines_log_big():
    return synthetic_fines_log(n_traces=1000, seed=0)


@pytest.fixture(scope="session")
def loans_log_big():
    return synthetic_loans_log(n_traces=1000, seed=0)


@pytest.fixture(scope="session")
def pipeline_dir(tmp_path_factory):
    """Artifacts of a complete seeded CLI run on a synthetic fines log.

    Exercises generate -> preprocess (split) -> build-mdp -> train once per
    session; service and CLI tests consume the resulting files.
    """
    root = tmp_path_factory.mktemp("pipeline")
    raw = root / "fines.csv"
    train = root / "train.jsonl"
    test = root / "test.jsonl"
    spec_out = root / "fines.calibrated.json"
    mdp_path = root / "mdp.json"
    policy_path = root / "policy.json"

    steps = [
        ("generate", "--scenario", "fines", "--n-traces", "400", "--seed", "7",
         "--out", str(raw)),
        ("preprocess", "--scenario", "fines", "--log", str(raw),
         "--split", "0.8", "--seed", "7", "--train-out", str(train),
         "--test-out", str(test), "--spec-out", str(spec_out)),
        ("build-mdp", "--scenario", "fines", "--log", str(train),
         "--out", str(mdp_path)),
        ("train", "--mdp", str(mdp_path), "--out", str(policy_path),
         "--episodes", "2000", "--max-iters", "10", "--seed", "7"),
    ]
    for argv in steps:
        code, out, err = helpers.run_cli(*argv)
        assert code == 0, f"pipeline step {argv[0]} failed: {out}{err}"
    return root


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for verdict, label in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{verdict}] {label}")
