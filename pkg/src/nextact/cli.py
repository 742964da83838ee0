"""Command-line pipeline driver.

Subcommands cover the whole workflow, each reading and writing the artifact
files the library modules define:

    generate    sample a synthetic event log for a built-in scenario
    preprocess  parse/filter/annotate a CSV log, optionally split train/test
    build-mdp   replay an (annotated) log into a decision-process artifact
    train       Monte Carlo policy iteration on an MDP artifact
    simulate    estimate policies' average KPI on a test MDP
    evaluate    rq1/rq2 comparisons against a held-out annotated log
    serve       HTTP recommendation service over trained artifacts

``--seed``, ``--scenario`` and ``--config`` behave the same everywhere; a
config file is a JSON object whose entries become flag defaults (explicit
flags still win). Exit status 0 on success, 1 with a diagnostic on error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .evaluate import compare_policies, format_rq1_table, format_rq2_table, \
    format_sim_table, rq1_report, rq2_prefix_analysis
from .log.csvio import ColumnMapping, load_log_file, serialize_log
from .log.jsonl import dump_annotated, load_annotated
from .log.ops import drop_activities, filter_variants, split_log
from .mdp.build import build_mdp, mdp_stats
from .mdp.io import export_dot, load_mdp, save_mdp
from .rl.io import load_policy_artifact, save_policy_artifact
from .rl.montecarlo import policy_iteration
from .rl.policy import customary_policy, random_policy
from .scenario.annotate import annotate
from .scenario.builtin import resolve_spec
from .scenario.spec import ScenarioSpec, save_spec
from .scenario.synthetic import synthetic_log


def default_mapping(scenario_id: str) -> ColumnMapping:
    """Column roles for the bundled scenarios' CSV logs."""
    if scenario_id == "fines":
        return ColumnMapping(event_attrs={"amount": "decimal"})
    if scenario_id == "loans":
        return ColumnMapping(trace_attrs={"amount": "decimal"})
    return ColumnMapping()


def _mapping_from_args(args, spec: ScenarioSpec) -> ColumnMapping:
    if getattr(args, "mapping", None):
        with open(args.mapping, encoding="utf-8") as handle:
            return ColumnMapping(**json.load(handle))
    return default_mapping(spec.scenario_id)


def _calibrated(spec: ScenarioSpec, log) -> ScenarioSpec:
    """Attach average activity durations estimated from ``log`` when the
    scenario's cost terms need them and the config does not carry a table."""
    if spec.needs_durations() and spec.duration_table is None:
        return spec.calibrate(log)
    return spec


def _load_any_log(path: str, spec: ScenarioSpec, mapping: ColumnMapping):
    """An annotated JSONL artifact, or a raw CSV annotated on the fly."""
    if path.endswith(".jsonl"):
        return load_annotated(path)
    raw = load_log_file(path, mapping)
    return annotate(raw, _calibrated(spec, raw))


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_generate(args) -> int:
    log = synthetic_log(args.scenario, n_traces=args.n_traces, seed=args.seed)
    mapping = default_mapping(args.scenario)
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        serialize_log(log, handle, mapping)
    print(f"generated {len(log)} traces / {log.n_events} events -> {args.out}")
    return 0


def cmd_preprocess(args) -> int:
    spec = resolve_spec(args.scenario)
    mapping = _mapping_from_args(args, spec)
    log = load_log_file(args.log, mapping)
    n_input = len(log)
    if args.min_variant_fraction > 0.0:
        log = filter_variants(log, args.min_variant_fraction)
    if args.drop:
        log = drop_activities(log, frozenset(args.drop.split(",")))
    if args.split is not None:
        train, test = split_log(log, args.split, seed=args.seed)
        spec = _calibrated(spec, train)
        dump_annotated(annotate(train, spec), args.train_out)
        dump_annotated(annotate(test, spec), args.test_out)
        print(f"kept {len(log)}/{n_input} traces; split {len(train)} train "
              f"-> {args.train_out}, {len(test)} test -> {args.test_out}")
    else:
        spec = _calibrated(spec, log)
        dump_annotated(annotate(log, spec), args.out)
        print(f"kept {len(log)}/{n_input} traces -> {args.out}")
    if args.spec_out:
        save_spec(spec, args.spec_out)
        print(f"scenario config (with durations) -> {args.spec_out}")
    return 0


def cmd_build_mdp(args) -> int:
    spec = resolve_spec(args.scenario)
    mapping = _mapping_from_args(args, spec)
    annotated = _load_any_log(args.log, spec, mapping)
    spec = _calibrated(spec, annotated)
    mdp = build_mdp(annotated, spec, lam=args.lam, gamma=args.gamma)
    save_mdp(mdp, args.out)
    if args.dot:
        export_dot(mdp, args.dot)
    if args.spec_out:
        save_spec(spec, args.spec_out)
    stats = mdp_stats(mdp)
    print(f"built MDP: {stats['n_states']} states, {stats['n_actions']} actions, "
          f"{stats['n_edges']} edges from {stats['n_decision_traces']} traces "
          f"-> {args.out}")
    return 0


def cmd_train(args) -> int:
    mdp = load_mdp(args.mdp)
    result = policy_iteration(
        mdp,
        episodes_per_iter=args.episodes,
        max_iters=args.max_iters,
        seed=args.seed,
        first_visit=not args.every_visit,
        init=args.init,
    )
    meta = {
        "episodes_per_iter": args.episodes,
        "max_iters": args.max_iters,
        "seed": args.seed,
        "first_visit": not args.every_visit,
        "init": args.init,
        "n_iterations": result.n_iterations,
        "converged": result.converged,
    }
    save_policy_artifact(args.out, result.policy, result.q, meta)
    if args.history:
        with open(args.history, "w", encoding="utf-8") as handle:
            for entry in result.history:
                handle.write(json.dumps(entry, sort_keys=True) + "\n")
    status = "converged" if result.converged else "stopped without converging"
    print(f"trained policy over {len(result.policy.mapping)} states in "
          f"{result.n_iterations} iterations ({status}) -> {args.out}")
    return 0


def cmd_simulate(args) -> int:
    mdp = load_mdp(args.mdp)
    policy, _, _ = load_policy_artifact(args.policy)
    policies = [policy]
    if args.baselines:
        policies += [customary_policy(mdp), random_policy()]
    reports = compare_policies(mdp, policies, n_cases=args.n_cases, seed=args.seed)
    print(format_sim_table(reports))
    if args.out:
        _write_json(args.out, {"reports": [r.to_dict() for r in reports]})
    return 0


def cmd_evaluate(args) -> int:
    spec = resolve_spec(args.scenario)
    mdp = load_mdp(args.mdp)
    policy, _, _ = load_policy_artifact(args.policy)
    test = load_annotated(args.test_log)
    if spec.needs_durations() and spec.duration_table is None:
        print("warning: estimating activity durations from the test log; "
              "pass the calibrated scenario config for faithful KPIs",
              file=sys.stderr)
        spec = _calibrated(spec, test)
    if args.mode == "rq1":
        report = rq1_report(test, policy, mdp, spec)
        print(format_rq1_table(report))
    else:
        report = rq2_prefix_analysis(test, policy, mdp, spec,
                                     max_prefix=args.max_prefix)
        print(format_rq2_table(report))
    if args.out:
        _write_json(args.out, report.to_dict())
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(args.mdp, args.policy, args.scenario)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_common(parser: argparse.ArgumentParser, scenario: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=0,
                        help="random seed (default 0)")
    if scenario:
        parser.add_argument("--scenario", default="fines",
                            help="built-in scenario id or scenario config path")
    parser.add_argument("--config", default=None,
                        help="JSON file of flag defaults for this invocation")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="nextact",
        description="learn and serve next-activity recommendations from event logs")
    subs = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    p = registry["generate"] = subs.add_parser(
        "generate", help="sample a synthetic event log")
    _add_common(p)
    p.add_argument("--n-traces", type=int, default=1000)
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_generate)

    p = registry["preprocess"] = subs.add_parser(
        "preprocess", help="parse, filter, annotate, optionally split")
    _add_common(p)
    p.add_argument("--log", required=True, help="CSV input path")
    p.add_argument("--mapping", default=None, help="column-mapping JSON path")
    p.add_argument("--min-variant-fraction", type=float, default=0.0,
                   help="keep only variants covering at least this trace fraction")
    p.add_argument("--drop", default=None,
                   help="comma-separated activities to drop")
    p.add_argument("--split", type=float, default=None,
                   help="training fraction; writes --train-out and --test-out")
    p.add_argument("--train-out", default="train.jsonl")
    p.add_argument("--test-out", default="test.jsonl")
    p.add_argument("--out", default="annotated.jsonl",
                   help="annotated output (no --split)")
    p.add_argument("--spec-out", default=None,
                   help="write the (calibrated) scenario config here")
    p.set_defaults(func=cmd_preprocess)

    p = registry["build-mdp"] = subs.add_parser(
        "build-mdp", help="replay a log into a decision-process artifact")
    _add_common(p)
    p.add_argument("--log", required=True,
                   help="annotated JSONL artifact or raw CSV")
    p.add_argument("--mapping", default=None, help="column-mapping JSON (CSV input)")
    p.add_argument("--lam", type=float, default=3.0,
                   help="reward damping pivot; 0 disables damping")
    p.add_argument("--gamma", type=float, default=1.0, help="discount factor")
    p.add_argument("--out", required=True, help="MDP artifact path")
    p.add_argument("--dot", default=None, help="also export Graphviz here")
    p.add_argument("--spec-out", default=None,
                   help="write the (calibrated) scenario config here")
    p.set_defaults(func=cmd_build_mdp)

    p = registry["train"] = subs.add_parser(
        "train", help="Monte Carlo policy iteration on an MDP artifact")
    _add_common(p, scenario=False)
    p.add_argument("--mdp", required=True, help="MDP artifact path")
    p.add_argument("--episodes", type=int, default=2000,
                   help="episodes per improvement round")
    p.add_argument("--max-iters", type=int, default=30)
    p.add_argument("--every-visit", action="store_true",
                   help="every-visit returns instead of first-visit")
    p.add_argument("--init", choices=("customary", "random"), default="customary",
                   help="initial policy for the first evaluation round")
    p.add_argument("--out", required=True, help="policy artifact path")
    p.add_argument("--history", default=None,
                   help="write per-iteration diagnostics JSONL here")
    p.set_defaults(func=cmd_train)

    p = registry["simulate"] = subs.add_parser(
        "simulate", help="estimate policy KPIs by simulating cases")
    _add_common(p, scenario=False)
    p.add_argument("--mdp", required=True, help="test MDP artifact path")
    p.add_argument("--policy", required=True, help="policy artifact path")
    p.add_argument("--n-cases", type=int, default=100_000)
    p.add_argument("--baselines", action="store_true",
                   help="also simulate the customary and random baselines")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_simulate)

    p = registry["evaluate"] = subs.add_parser(
        "evaluate", help="compare the policy against a held-out log")
    p.add_argument("mode", choices=("rq1", "rq2"))
    _add_common(p)
    p.add_argument("--mdp", required=True, help="MDP artifact path")
    p.add_argument("--policy", required=True, help="policy artifact path")
    p.add_argument("--test-log", required=True,
                   help="annotated JSONL artifact of held-out traces")
    p.add_argument("--max-prefix", type=int, default=6,
                   help="largest prefix length for rq2")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_evaluate)

    p = registry["serve"] = subs.add_parser(
        "serve", help="HTTP recommendation service")
    _add_common(p)
    p.add_argument("--mdp", required=True, help="MDP artifact path")
    p.add_argument("--policy", required=True, help="policy artifact path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser, registry


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as handle:
                overrides = {k.replace("-", "_"): v for k, v in json.load(handle).items()}
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            return 1
        for sub in [parser, *registry.values()]:
            sub.set_defaults(**overrides)
        args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
