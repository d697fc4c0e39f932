"""Command-line entry point: run, sweep, predict, verify.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 divergence (partial outputs are still written).

Standard-output summaries are single-line JSON so scripts and the figure
renderer can consume them without scraping.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import verify as verify_mod
from .dynamics import RunConfig, run_trajectory
from .errors import ConfigError, Diverged, LindynError, NotActiveRegion
from .metrics import predict_tstar, threshold_crossings
from .sweep import SweepCell, SweepConfig, export_sweep, run_cell
from .tasks import (DEFAULT_C_LR, make_task, make_task_from_svals,
                    scaling_point)

RUN_SCHEMA = {
    "task": {"d", "K", "seed", "a_list"},
    "scaling": {"gamma_w", "gamma_sigma2", "c_lr"},
    "run": {"mode", "max_steps", "stop_tol", "record_extras"},
    "output": {"directory", "prefix"},
}
RECORD_EXTRAS = {"x", "thm1", "drift", "snapshots"}


def load_run_config(path: str) -> dict:
    """Parse and strictly validate a run-configuration JSON document."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(doc) - set(RUN_SCHEMA)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    for section, keys in RUN_SCHEMA.items():
        body = doc.get(section, {})
        if not isinstance(body, dict):
            raise ConfigError(f"section {section!r} must be an object")
        extra = set(body) - keys
        if extra:
            raise ConfigError(f"unknown keys in {section!r}: {sorted(extra)}")
    return doc


def _merged(doc: dict, section: str, key: str, flag_value, default=None):
    if flag_value is not None:
        return flag_value
    return doc.get(section, {}).get(key, default)


def _build_run(args) -> tuple[RunConfig, str, str]:
    doc = load_run_config(args.config) if args.config else {}
    d = _merged(doc, "task", "d", args.d)
    K = _merged(doc, "task", "K", args.K)
    seed = _merged(doc, "task", "seed", args.seed, 0)
    a_list = _merged(doc, "task", "a_list", None)
    gw = _merged(doc, "scaling", "gamma_w", args.gw)
    gs2 = _merged(doc, "scaling", "gamma_sigma2", args.gs2)
    c_lr = _merged(doc, "scaling", "c_lr", args.c_lr, DEFAULT_C_LR)
    mode = _merged(doc, "run", "mode", args.mode, "gd")
    max_steps = _merged(doc, "run", "max_steps", args.max_steps)
    stop_tol = _merged(doc, "run", "stop_tol", args.stop_tol, 1e-9)
    extras = set(_merged(doc, "run", "record_extras", None, []) or [])
    out_dir = _merged(doc, "output", "directory", args.out_dir, "runs")
    prefix = _merged(doc, "output", "prefix", args.prefix, "run")

    for name, value in (("d", d), ("gamma_w", gw), ("gamma_sigma2", gs2)):
        if value is None:
            raise ConfigError(f"missing required parameter {name}")
    if a_list is None and K is None:
        raise ConfigError("missing required parameter K (or an explicit a_list)")
    d = int(d)
    if d < 2:
        raise ConfigError(f"d = {d} must be >= 2")
    if max_steps is not None and int(max_steps) < 1:
        raise ConfigError(f"max_steps = {max_steps} must be >= 1")
    bad = extras - RECORD_EXTRAS
    if bad:
        raise ConfigError(f"unknown record_extras {sorted(bad)}; "
                          f"choose from {sorted(RECORD_EXTRAS)}")

    if a_list is not None:
        task = make_task_from_svals(d, [float(v) for v in a_list], int(seed))
    else:
        task = make_task(d, int(K), int(seed))
    scaling = scaling_point(d, float(gw), float(gs2), float(c_lr),
                            a_star_op=task.a_star_op)
    cfg = RunConfig(task=task, scaling=scaling, mode=str(mode),
                    max_steps=None if max_steps is None else int(max_steps),
                    stop_tol=None if stop_tol in (None, "none") else float(stop_tol),
                    record_x=True,
                    record_thm1="thm1" in extras,
                    record_drift="drift" in extras,
                    snapshots="snapshots" in extras,
                    gd_impl="factors" if "drift" in extras else "auto")
    return cfg, out_dir, prefix


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _run_summary(record, cfg: RunConfig) -> dict:
    task, scaling = cfg.task, cfg.scaling
    crossings = threshold_crossings(record, scaling)
    try:
        tstar = predict_tstar(scaling, task.a_list, record.eta)
    except LindynError:
        tstar = None
    return {
        "argmin_test_err": record.argmin_test_value,
        "argmin_step": record.argmin_test_step,
        "final_step": int(record.steps[-1]),
        "stop_reason": record.stop_reason,
        "crossings": [[i, s] for i, s in crossings],
        "crossed_before_argmin": [i for i, s in crossings
                                  if s <= record.argmin_test_step],
        "tstar_steps": tstar,
        "eta": record.eta,
        "sigma2w": scaling.sigma2w,
        "region": scaling.region_flags(),
    }


def cmd_run(args) -> int:
    cfg, out_dir, prefix = _build_run(args)
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, prefix)
    try:
        record = run_trajectory(cfg)
    except Diverged as err:
        if err.record is not None and len(err.record.steps):
            err.record.to_csv(base + ".csv")
            err.record.write_manifest(base + ".manifest.json")
        _emit({"error": "diverged", "detail": str(err),
               "outputs": [base + ".csv", base + ".manifest.json"]})
        return 3
    record.to_csv(base + ".csv")
    record.write_manifest(base + ".manifest.json")
    summary = _run_summary(record, cfg)
    summary["outputs"] = [base + ".csv", base + ".manifest.json"]
    _emit(summary)
    return 0


def cmd_sweep(args) -> int:
    a_list = None
    if args.a:
        a_list = tuple(float(v) for v in args.a.split(","))
    config = SweepConfig(
        d=args.d, K=args.K, seed=args.seed,
        gs2_min=args.gs2_min, gs2_max=args.gs2_max, gs2_count=args.gs2_count,
        gw_min=args.gw_min, gw_max=args.gw_max, gw_count=args.gw_count,
        c_lr=args.c_lr, with_sc=args.with_sc, max_steps=args.max_steps,
        stop_tol=args.stop_tol, workers=args.workers, a_list=a_list,
    )
    config.validate()
    os.makedirs(args.out_dir, exist_ok=True)
    base = os.path.join(args.out_dir, args.prefix)
    jobs = [(i, j) for i in range(config.gs2_count) for j in range(config.gw_count)]
    results: dict[tuple[int, int], SweepCell] = {}
    interrupted = False
    try:
        from .sweep import _run_cell_star, resolve_workers
        workers = resolve_workers(config.workers)
        if workers == 1 or len(jobs) == 1:
            for i, j in jobs:
                results[(i, j)] = run_cell(config, i, j)
        else:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for key, cell in pool.map(_run_cell_star,
                                          [(config, i, j) for i, j in jobs]):
                    results[key] = cell
    except KeyboardInterrupt:
        interrupted = True
    rows = [[results[(i, j)] for j in range(config.gw_count) if (i, j) in results]
            for i in range(config.gs2_count)]
    rows = [r for r in rows if r]
    export_sweep(rows, base + ".csv", config, base + ".manifest.json")
    n_div = sum(cell.diverged for row in rows for cell in row)
    _emit({"cells": sum(len(r) for r in rows), "diverged": n_div,
           "interrupted": interrupted,
           "outputs": [base + ".csv", base + ".manifest.json"]})
    if interrupted:
        return 130
    if args.strict and n_div:
        return 3
    return 0


def cmd_predict(args) -> int:
    if args.a:
        a = [float(v) for v in args.a.split(",")]
        d = args.d if args.d is not None else 100
        task = None
    else:
        if args.d is None or args.K is None:
            raise ConfigError("predict needs --a or both --d and --K")
        task = make_task(args.d, args.K, args.seed)
        a = list(task.a_list)
        d = args.d
    scaling = scaling_point(d, args.gw, args.gs2, args.c_lr,
                            a_star_op=None if task is None else task.a_star_op)
    eta = scaling.eta if scaling.eta is not None else args.eta
    if eta is None:
        raise ConfigError("learning rate unresolved; pass --eta or task parameters")
    delta = 1.0 - args.gs2 - args.gw
    payload = {"delta": delta, "eta": eta, "a": a,
               "region": scaling.region_flags(),
               "note": "T* is the leading-order term; the O(d log log d) "
                       "remainder is omitted"}
    try:
        from .metrics import c_constant
        payload["c_a"] = c_constant(a)
        payload["tstar_steps"] = predict_tstar(scaling, a, eta)
    except LindynError as err:
        payload["c_a"] = None
        payload["tstar_steps"] = None
        payload["reason"] = f"{type(err).__name__}: {err}"
    _emit(payload)
    return 0


def cmd_verify(args) -> int:
    names = [s.strip() for s in args.suite.split(",")]
    results = verify_mod.run_suites(names, d=args.d, seed=args.seed)
    width = max(len(c[0]) for _, c in results)
    failures = 0
    for suite, (name, passed, detail) in results:
        status = "PASS" if passed else "FAIL"
        if not passed:
            failures += 1
        line = f"{status}  {suite:<14} {name:<{width}}"
        if detail:
            line += f"  {detail}"
        print(line)
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindyn",
        description="Shallow linear-network training dynamics: runs, sweeps, "
                    "theory predictions and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single trajectory; writes CSV + manifest")
    run.add_argument("--config", help="JSON config file (flags override it)")
    run.add_argument("--d", type=int)
    run.add_argument("--K", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--gw", type=float, help="width exponent gamma_w")
    run.add_argument("--gs2", type=float, help="variance exponent gamma_sigma2")
    run.add_argument("--c-lr", dest="c_lr", type=float)
    run.add_argument("--mode", choices=["gd", "self_consistent", "lazy", "balanced"])
    run.add_argument("--max-steps", dest="max_steps", type=int)
    run.add_argument("--stop-tol", dest="stop_tol", type=float)
    run.add_argument("--out-dir", dest="out_dir")
    run.add_argument("--prefix")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="phase-diagram grid; writes CSV + manifest")
    sweep.add_argument("--d", type=int, required=True)
    sweep.add_argument("--K", type=int, required=True)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--gs2-min", type=float, required=True)
    sweep.add_argument("--gs2-max", type=float, required=True)
    sweep.add_argument("--gs2-count", type=int, required=True)
    sweep.add_argument("--gw-min", type=float, required=True)
    sweep.add_argument("--gw-max", type=float, required=True)
    sweep.add_argument("--gw-count", type=int, required=True)
    sweep.add_argument("--c-lr", dest="c_lr", type=float, default=DEFAULT_C_LR)
    sweep.add_argument("--a", help="explicit comma-separated target spectrum "
                                   "(deterministic task variant)")
    sweep.add_argument("--with-sc", action="store_true",
                       help="also run the self-consistent dynamics per cell")
    sweep.add_argument("--max-steps", dest="max_steps", type=int, default=200_000)
    sweep.add_argument("--stop-tol", dest="stop_tol", type=float, default=1e-9)
    sweep.add_argument("--workers", type=int,
                       help="worker processes (default: LINDYN_THREADS or cores)")
    sweep.add_argument("--strict", action="store_true",
                       help="nonzero exit if any cell diverged")
    sweep.add_argument("--out-dir", dest="out_dir", default="runs")
    sweep.add_argument("--prefix", default="sweep")
    sweep.set_defaults(func=cmd_sweep)

    predict = sub.add_parser("predict", help="T*, c(a), delta and region flags as JSON")
    predict.add_argument("--d", type=int)
    predict.add_argument("--K", type=int)
    predict.add_argument("--seed", type=int, default=0)
    predict.add_argument("--a", help="explicit comma-separated a-list, e.g. 2,1")
    predict.add_argument("--gw", type=float, required=True)
    predict.add_argument("--gs2", type=float, required=True)
    predict.add_argument("--c-lr", dest="c_lr", type=float, default=DEFAULT_C_LR)
    predict.add_argument("--eta", type=float)
    predict.set_defaults(func=cmd_predict)

    ver = sub.add_parser("verify", help="run invariant suites; exit 0 iff all pass")
    ver.add_argument("--suite", default="all",
                     help="comma-separated suite names or 'all'")
    ver.add_argument("--d", type=int, default=50)
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except Diverged as err:
        print(f"diverged: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
