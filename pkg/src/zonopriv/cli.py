"""Command-line entry point for reproducible experiments.

Exit codes: 0 success, 1 flag/validation error, 2 runtime failure.  All
output files are written atomically (temp file + rename).  stdout carries
machine-readable summaries only; progress goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .experiments import (
    delta_table_to_csv,
    matched_laplace_distribution,
    metrics_to_csv,
    reproduce_delta_table,
    run_single,
)
from .noise.distribution import TruncatedDistribution
from .noise.grid import build_grid, default_half_bins
from .noise.training import DEFAULT_STACK_DEPTH, TrainingSchedule, train
from .scenarios import (
    quadcopter_scenario,
    rotating_object_scenario,
    scenario_from_json_dict,
)
from .traces import traces_to_csv, traces_to_jsonl

SEED_ENV_VAR = "ZONOPRIV_SEED"


class _CliError(Exception):
    """Validation failure; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _positive(kind=float):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _float_list(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _build_parser() -> _Parser:
    parser = _Parser(prog="zonopriv",
                     description="Differentially private set-based "
                                 "estimation experiments")
    parser.add_argument("--verbose", action="store_true",
                        help="extra progress output on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    schedule_flags = argparse.ArgumentParser(add_help=False)
    schedule_flags.add_argument("--epochs", type=_positive(int), default=2000,
                                help="training epochs (default 2000)")
    schedule_flags.add_argument("--learning-rate", type=_positive(), default=0.05,
                                help="gradient step size (default 0.05)")
    schedule_flags.add_argument("--omega-start", type=_positive(), default=0.05,
                                help="initial utility weight (default 0.05)")
    schedule_flags.add_argument("--omega-min", type=_positive(), default=1e-3,
                                help="utility weight floor (default 1e-3)")
    schedule_flags.add_argument("--gamma-decay", type=_positive(), default=200.0,
                                help="utility weight half-life in epochs "
                                     "(default 200)")
    schedule_flags.add_argument("--gamma-norm", type=int, choices=(1, 2),
                                default=2, help="utility norm (default 2)")

    p_opt = sub.add_parser("optimize-noise", parents=[schedule_flags],
                           help="train a truncated noise distribution")
    p_opt.add_argument("--epsilon", type=_positive(), required=True,
                       help="privacy budget (required)")
    p_opt.add_argument("--range", dest="noise_range", type=_positive(),
                       required=True, help="noise support half-width d")
    p_opt.add_argument("--sensitivity", type=_positive(), required=True,
                       help="adjacency bound s (required)")
    p_opt.add_argument("--half-bins", type=_positive(int), default=None,
                       help="grid half-bin count N (default: smallest "
                            "N >= 200 aligning the sensitivity)")
    p_opt.add_argument("--stack-depth", type=_positive(int), default=None,
                       help="sigmoid stack depth v (default: one per "
                            "sensitivity strip when d/s is integral, else "
                            f"{DEFAULT_STACK_DEPTH})")
    p_opt.add_argument("--seed", type=int, default=0,
                       help="initialization seed (default 0)")
    p_opt.add_argument("--out", required=True, help="distribution JSON path")

    p_run = sub.add_parser("run-estimator",
                           help="run benchmark scenario(s) and write traces")
    p_run.add_argument("--scenario", default="quadcopter",
                       help="quadcopter, rotating, or a scenario JSON path "
                            "(default quadcopter)")
    p_run.add_argument("--privacy-model", choices=("cdp", "ldp", "none"),
                       default="cdp", help="mechanism placement (default cdp)")
    p_run.add_argument("--noise", help="distribution JSON from optimize-noise "
                                       "(required unless privacy-model=none)")
    p_run.add_argument("--noise-type", choices=("optimal", "laplace"),
                       default="optimal",
                       help="laplace swaps in the truncated-Laplace baseline "
                            "at the same (epsilon, delta)")
    p_run.add_argument("--seeds", type=_positive(int), default=20,
                       help="number of per-seed runs (default 20)")
    p_run.add_argument("--seed", type=int, default=0,
                       help="base seed; run i uses seed base+i (default 0)")
    p_run.add_argument("--horizon", type=_positive(int), default=None,
                       help="override scenario step count "
                            "(default: scenario value)")
    p_run.add_argument("--reduction-order", type=_positive(int), default=5,
                       help="zonotope order cap q (default 5)")
    p_run.add_argument("--scenario-seed", type=int, default=0,
                       help="seed for scenario construction (default 0)")
    p_run.add_argument("--jobs", type=_positive(int), default=None,
                       help="worker processes (default: available cores)")
    p_run.add_argument("--out", required=True, help="output directory")

    p_cmp = sub.add_parser("compare-laplace",
                           help="train optimal noise, run it against the "
                                "matched truncated-Laplace baseline")
    p_cmp.add_argument("--epsilon", type=_positive(), required=True,
                       help="privacy budget (required)")
    p_cmp.add_argument("--range", dest="noise_range", type=_positive(),
                       required=True, help="noise support half-width d")
    p_cmp.add_argument("--sensitivity", type=_positive(), required=True,
                       help="adjacency bound s (required)")
    p_cmp.add_argument("--scenario", default="quadcopter",
                       help="benchmark scenario (default quadcopter)")
    p_cmp.add_argument("--privacy-model", choices=("cdp", "ldp"),
                       default="cdp", help="mechanism placement (default cdp)")
    p_cmp.add_argument("--seeds", type=_positive(int), default=30,
                       help="per-arm seed count (default 30)")
    p_cmp.add_argument("--seed", type=int, default=0,
                       help="base seed (default 0)")
    p_cmp.add_argument("--horizon", type=_positive(int), default=None,
                       help="override scenario step count "
                            "(default: scenario value)")
    p_cmp.add_argument("--reduction-order", type=_positive(int), default=5,
                       help="zonotope order cap q (default 5)")
    p_cmp.add_argument("--scenario-seed", type=int, default=0,
                       help="seed for scenario construction (default 0)")
    p_cmp.add_argument("--jobs", type=_positive(int), default=None,
                       help="worker processes (default: available cores)")
    p_cmp.add_argument("--out", required=True, help="output directory")

    p_tab = sub.add_parser("reproduce-table", parents=[schedule_flags],
                           help="train a distribution per (epsilon, range) "
                                "cell and tabulate the deltas")
    p_tab.add_argument("--epsilons", type=_float_list,
                       default=[0.1, 0.3, 0.5, 0.7],
                       help="comma-separated budgets "
                            "(default 0.1,0.3,0.5,0.7)")
    p_tab.add_argument("--ranges", type=_float_list,
                       default=[3, 5, 7, 9, 11, 13, 15],
                       help="comma-separated ranges d "
                            "(default 3,5,7,9,11,13,15)")
    p_tab.add_argument("--sensitivity", type=_positive(), default=1.0,
                       help="adjacency bound s (default 1)")
    p_tab.add_argument("--seed", type=int, default=0,
                       help="initialization seed (default 0)")
    p_tab.add_argument("--out", required=True, help="table CSV path")
    return parser


def _schedule_from_args(args) -> TrainingSchedule:
    return TrainingSchedule(
        omega_start=args.omega_start,
        omega_min=args.omega_min,
        gamma_decay=args.gamma_decay,
        gamma_norm=args.gamma_norm,
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        seed=getattr(args, "seed", 0),
    )


def _effective_seed(args) -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _CliError(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    return args.seed


def _default_stack_depth(d: float, s: float) -> int:
    strips = d / s
    if abs(strips - round(strips)) < 1e-9:
        return max(1, int(round(strips)))
    return DEFAULT_STACK_DEPTH


def _cmd_optimize_noise(args) -> int:
    seed = _effective_seed(args)
    half_bins = args.half_bins or default_half_bins(args.noise_range,
                                                    args.sensitivity)
    grid = build_grid(args.noise_range, half_bins)
    depth = args.stack_depth or _default_stack_depth(args.noise_range,
                                                     args.sensitivity)
    progress = (lambda t, loss: print(f"epoch {t}: loss {loss:.6g}",
                                      file=sys.stderr))
    dist = train(grid, args.epsilon, args.sensitivity,
                 _schedule_from_args(args), seed, stack_depth=depth,
                 progress=progress)
    _atomic_write(Path(args.out), json.dumps(dist.to_json_dict()))
    print(json.dumps({"delta": dist.delta, "epsilon": args.epsilon,
                      "d": args.noise_range, "s": args.sensitivity,
                      "out": str(args.out)}))
    return 0


def _load_scenario(name: str, scenario_seed: int, horizon: int | None):
    if name == "quadcopter":
        scenario = quadcopter_scenario(scenario_seed)
    elif name == "rotating":
        scenario = rotating_object_scenario(scenario_seed)
    else:
        path = Path(name)
        if not path.exists():
            raise _CliError(f"scenario {name!r} is neither a builtin "
                            "(quadcopter, rotating) nor a readable file")
        with open(path) as fh:
            scenario = scenario_from_json_dict(json.load(fh))
    if horizon is not None:
        scenario.horizon = horizon
    return scenario


def _run_seed_grid(scenario, dist, mode, seeds, reduction_order, jobs):
    """Fan per-seed runs out to a process pool, results in seed order."""
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = min(jobs, len(seeds))
    if jobs <= 1:
        return [run_single(scenario, dist, mode, seed, reduction_order)
                for seed in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_single, scenario, dist, mode, seed,
                               reduction_order) for seed in seeds]
        return [f.result() for f in futures]


def _cmd_run_estimator(args) -> int:
    mode = {"cdp": "cdp", "ldp": "ldp", "none": "nonprivate"}[args.privacy_model]
    dist = None
    if mode != "nonprivate":
        if not args.noise:
            raise _CliError("--noise is required unless --privacy-model none")
        dist = TruncatedDistribution.load(args.noise)
        if args.noise_type == "laplace":
            dist = matched_laplace_distribution(dist)
    scenario = _load_scenario(args.scenario, args.scenario_seed, args.horizon)
    base = _effective_seed(args)
    seeds = [base + i for i in range(args.seeds)]
    results = _run_seed_grid(scenario, dist, mode, seeds,
                             args.reduction_order, args.jobs)
    out_dir = Path(args.out)
    entries = []
    for seed, (metrics, traces) in zip(seeds, results):
        print(f"seed {seed}: containment {metrics.containment_rate:.3f} "
              f"error {metrics.mean_center_error:.4f}", file=sys.stderr)
        _atomic_write(out_dir / f"trace_seed{seed}.jsonl",
                      traces_to_jsonl(traces))
        _atomic_write(out_dir / f"trace_seed{seed}.csv", traces_to_csv(traces))
        entries.append({
            "scenario": scenario.name, "mode": mode,
            "noise_type": args.noise_type if dist is not None else "none",
            "epsilon": dist.epsilon if dist is not None else None,
            "d": dist.grid.d if dist is not None else None,
            "delta": dist.delta if dist is not None else None,
            "metrics": metrics,
        })
    _atomic_write(out_dir / "metrics.csv", metrics_to_csv(entries))
    summary = {
        "runs": len(entries),
        "containment_rate": float(np.mean(
            [e["metrics"].containment_rate for e in entries])),
        "mean_center_error": float(np.mean(
            [e["metrics"].mean_center_error for e in entries])),
        "out": str(out_dir),
    }
    print(json.dumps(summary))
    return 0


def _cmd_compare_laplace(args) -> int:
    seed = _effective_seed(args)
    grid = build_grid(args.noise_range,
                      default_half_bins(args.noise_range, args.sensitivity))
    depth = _default_stack_depth(args.noise_range, args.sensitivity)
    print("training optimal noise distribution...", file=sys.stderr)
    dist = train(grid, args.epsilon, args.sensitivity, init_seed=seed,
                 stack_depth=depth)
    laplace = matched_laplace_distribution(dist)
    print(f"optimal delta {dist.delta:.6g}; laplace range "
          f"{laplace.grid.d:.4g} delta {laplace.delta:.6g}", file=sys.stderr)
    scenario = _load_scenario(args.scenario, args.scenario_seed, args.horizon)
    seeds = [seed + i for i in range(args.seeds)]
    entries = []
    stats = {}
    for noise, label in ((dist, "optimal"), (laplace, "laplace")):
        results = _run_seed_grid(scenario, noise, args.privacy_model, seeds,
                                 args.reduction_order, args.jobs)
        errors = np.array([m.mean_center_error for m, _ in results])
        stats[label] = {
            "mean_center_error": float(errors.mean()),
            "stderr": float(errors.std(ddof=1) / np.sqrt(len(errors)))
            if len(errors) > 1 else 0.0,
            "delta": noise.delta,
            "d": noise.grid.d,
        }
        print(f"{label}: mean error {errors.mean():.4f}", file=sys.stderr)
        entries.extend({
            "scenario": scenario.name, "mode": args.privacy_model,
            "noise_type": label, "epsilon": noise.epsilon,
            "d": noise.grid.d, "delta": noise.delta, "metrics": m,
        } for m, _ in results)
    out_dir = Path(args.out)
    _atomic_write(out_dir / "metrics.csv", metrics_to_csv(entries))
    summary = {"epsilon": args.epsilon, "mode": args.privacy_model,
               "seeds": args.seeds, **{f"{k}_{k2}": v2 for k, v in
                                       stats.items() for k2, v2 in v.items()}}
    _atomic_write(out_dir / "summary.json", json.dumps(summary, indent=2))
    print(json.dumps(summary))
    return 0


def _cmd_reproduce_table(args) -> int:
    seed = _effective_seed(args)
    schedule = _schedule_from_args(args)
    progress = (lambda row: print(
        f"cell epsilon={row['epsilon']:g} d={row['d']:g}: "
        f"delta {row['delta_trained']:.6g} "
        f"(laplace closed form {row['delta_laplace_closed_form']:.6g})",
        file=sys.stderr))
    rows = reproduce_delta_table(args.epsilons, args.ranges, args.sensitivity,
                                 schedule, seed, progress=progress)
    out = Path(args.out)
    _atomic_write(out, delta_table_to_csv(rows, "delta_trained"))
    laplace_out = out.with_name(out.stem + "_laplace" + out.suffix)
    _atomic_write(laplace_out,
                  delta_table_to_csv(rows, "delta_laplace_closed_form"))
    print(json.dumps({"cells": len(rows), "out": str(out),
                      "laplace_out": str(laplace_out)}))
    return 0


_COMMANDS = {
    "optimize-noise": _cmd_optimize_noise,
    "run-estimator": _cmd_run_estimator,
    "compare-laplace": _cmd_compare_laplace,
    "reproduce-table": _cmd_reproduce_table,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
