"""Phase-diagram experiments over the (gamma_sigma2, gamma_w) grid.

Cells are independent work items run by a bounded process pool; results
are keyed by grid index, so the output is identical for any worker count
and execution order. All cells share the task realization (same seed);
weight initializations get per-cell sub-seeds.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .dynamics import RunConfig, TrajectoryRecord, run_trajectory
from .errors import ConfigError, Diverged, ScheduleMismatch
from .tasks import (DEFAULT_C_LR, SEED_SWEEP_CELL, Task, make_task,
                    make_task_from_svals, scaling_point)

DIST_FLOOR = 1e-300
DEFAULT_CELL_MAX_STEPS = 200_000

# Candidate boundary lines of the phase diagram, for renderers: the
# lazy/active transition and the two edges of the theory region.
BOUNDARY_LINES = {
    "lazy_active": "gamma_sigma2 + gamma_w = 1",
    "finite_variance": "2 gamma_sigma2 + gamma_w = 0",
    "overparametrized": "gamma_w = 1",
}


@dataclass(frozen=True)
class SweepConfig:
    d: int
    K: int
    seed: int
    gs2_min: float
    gs2_max: float
    gs2_count: int
    gw_min: float
    gw_max: float
    gw_count: int
    c_lr: float = DEFAULT_C_LR
    with_sc: bool = False          # also run self-consistent, for the distance panel
    max_steps: int = DEFAULT_CELL_MAX_STEPS
    stop_tol: float = 1e-9
    workers: int | None = None
    a_list: tuple[float, ...] | None = None   # explicit spectrum instead of make_task

    def validate(self) -> None:
        if self.gs2_count < 1 or self.gw_count < 1:
            raise ConfigError("grid counts must be >= 1")
        for v in (self.gs2_min, self.gs2_max, self.gw_min, self.gw_max):
            if not np.isfinite(v):
                raise ConfigError("grid ranges must be finite")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be >= 1")
        if self.a_list is not None and len(self.a_list) != self.K:
            raise ConfigError("a_list length must equal K")

    def build_task(self) -> Task:
        if self.a_list is not None:
            return make_task_from_svals(self.d, list(self.a_list), self.seed)
        return make_task(self.d, self.K, self.seed)

    def gs2_values(self) -> np.ndarray:
        return np.linspace(self.gs2_min, self.gs2_max, self.gs2_count)

    def gw_values(self) -> np.ndarray:
        return np.linspace(self.gw_min, self.gw_max, self.gw_count)


@dataclass(frozen=True)
class SweepCell:
    gamma_sigma2: float
    gamma_w: float
    min_test_err: float
    stable_rank: float
    steps_to_min: int
    ln_gd_sc_dist: float | None
    lazy: bool
    active: bool
    degenerate: bool
    diverged: bool


def cell_seed(seed: int, i: int, j: int) -> int:
    """Deterministic per-cell weight-init seed (task seed stays shared)."""
    return int(np.random.SeedSequence((seed, SEED_SWEEP_CELL, i, j)).generate_state(1)[0])


def gd_vs_sc_distance(record_a: TrajectoryRecord, record_b: TrajectoryRecord) -> float:
    """ln of the time-averaged d^{-2} ||A_gd - A_sc||_F^2 at matched checkpoints."""
    if (len(record_a.steps) != len(record_b.steps)
            or np.any(record_a.steps != record_b.steps)):
        raise ScheduleMismatch("records do not share a recording schedule")
    snaps_a = record_a.snapshot_dict()
    snaps_b = record_b.snapshot_dict()
    if sorted(snaps_a) != sorted(snaps_b):
        raise ScheduleMismatch("records do not share a snapshot schedule")
    if not snaps_a:
        raise ScheduleMismatch("no matched checkpoints retained")
    d = record_a.config.task.d
    sq = [float(np.sum((snaps_a[s] - snaps_b[s]) ** 2)) / d ** 2 for s in sorted(snaps_a)]
    return float(np.log(max(float(np.mean(sq)), DIST_FLOOR)))


def run_cell(config: SweepConfig, i: int, j: int) -> SweepCell:
    """One grid point: GD (and optionally self-consistent) plus summary."""
    gs2 = float(config.gs2_values()[i])
    gw = float(config.gw_values()[j])
    task = config.build_task()
    scaling = scaling_point(config.d, gw, gs2, config.c_lr, a_star_op=task.a_star_op)
    seed = cell_seed(config.seed, i, j)
    # a monotonicity violation raises Diverged, which flags the cell below
    base = RunConfig(task=task, scaling=scaling, mode="gd", seed=seed,
                     max_steps=config.max_steps, stop_tol=config.stop_tol,
                     record_x=False, snapshots=config.with_sc,
                     track_argmin_matrix=True)
    diverged = False
    try:
        gd = run_trajectory(base)
    except Diverged as err:
        diverged = True
        gd = err.record
    ln_dist = None
    if config.with_sc and not diverged and gd is not None and len(gd.steps) > 1:
        sc_cfg = RunConfig(task=task, scaling=scaling, mode="self_consistent",
                           seed=seed, max_steps=int(gd.steps[-1]), stop_tol=None,
                           record_x=False, snapshots=True, check_monotone=False)
        try:
            sc = run_trajectory(sc_cfg)
            ln_dist = gd_vs_sc_distance(gd, sc)
        except Diverged:
            ln_dist = None
    if gd is None or len(gd.steps) == 0:
        min_test, srank, steps_min = float("nan"), float("nan"), -1
    else:
        min_test = gd.argmin_test_value
        steps_min = gd.argmin_test_step
        try:
            srank = linalg.stable_rank(gd.argmin_A) if gd.argmin_A is not None else float("nan")
        except Exception:
            srank = float("nan")
    return SweepCell(gamma_sigma2=gs2, gamma_w=gw, min_test_err=min_test,
                     stable_rank=srank, steps_to_min=steps_min,
                     ln_gd_sc_dist=ln_dist, lazy=scaling.is_lazy,
                     active=scaling.is_active, degenerate=scaling.degenerate,
                     diverged=diverged)


def _run_cell_star(args) -> tuple[tuple[int, int], SweepCell]:
    config, i, j = args
    return (i, j), run_cell(config, i, j)


def resolve_workers(requested: int | None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("LINDYN_THREADS")
    if env is not None and env.strip().isdigit():
        return max(1, int(env))
    return os.cpu_count() or 1


def run_sweep(config: SweepConfig) -> list[list[SweepCell]]:
    """Grid of SweepCells indexed [i_gs2][j_gw]; divergent cells are flagged,
    never aborting the sweep."""
    config.validate()
    jobs = [(config, i, j)
            for i in range(config.gs2_count) for j in range(config.gw_count)]
    results: dict[tuple[int, int], SweepCell] = {}
    workers = resolve_workers(config.workers)
    if workers == 1 or len(jobs) == 1:
        for job in jobs:
            key, cell = _run_cell_star(job)
            results[key] = cell
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for key, cell in pool.map(_run_cell_star, jobs):
                results[key] = cell
    return [[results[(i, j)] for j in range(config.gw_count)]
            for i in range(config.gs2_count)]


CSV_COLUMNS = ["gamma_sigma2", "gamma_w", "min_test_err", "stable_rank",
               "steps_to_min", "ln_gd_sc_dist", "lazy_flag", "active_flag",
               "degenerate_flag", "diverged"]


def export_sweep(cells: list[list[SweepCell]], csv_path: str,
                 config: SweepConfig | None = None,
                 manifest_path: str | None = None) -> None:
    """CSV (one row per cell) plus a JSON manifest; byte-identical on reruns."""
    with open(csv_path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(CSV_COLUMNS)
        for row in cells:
            for cell in row:
                out.writerow([
                    repr(float(cell.gamma_sigma2)), repr(float(cell.gamma_w)),
                    repr(float(cell.min_test_err)), repr(float(cell.stable_rank)),
                    int(cell.steps_to_min),
                    "" if cell.ln_gd_sc_dist is None else repr(float(cell.ln_gd_sc_dist)),
                    int(cell.lazy), int(cell.active),
                    int(cell.degenerate), int(cell.diverged),
                ])
    if manifest_path is not None and config is not None:
        from ._version import __version__
        manifest = {"config": asdict(config), "rows": sum(len(r) for r in cells),
                    "boundary_lines": BOUNDARY_LINES, "columns": CSV_COLUMNS,
                    "lindyn_version": __version__}
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
