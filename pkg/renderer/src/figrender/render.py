"""Trajectory plots and phase-diagram heatmap panels.

Consumes the documented CSV schemas of the simulator:

* trajectory CSV: step, train_err, test_err, sv_1..sv_n, x_align,
  thm1_gap, inv_drift, with an optional JSON sidecar
  (<name>.manifest.json) carrying mode, K and sigma2w;
* sweep CSV: gamma_sigma2, gamma_w, min_test_err, stable_rank,
  steps_to_min, ln_gd_sc_dist, lazy_flag, active_flag, degenerate_flag,
  diverged.

Rendering never mutates its inputs; rerunning on the same inputs with the
same renderer version produces an identical image.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figrender"

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from matplotlib.colors import LogNorm


class SchemaError(Exception):
    """Input CSV does not match the documented schema."""


class MissingColumn(SchemaError):
    """A required column is absent."""


TRAJECTORY_REQUIRED = ["step", "train_err", "test_err"]
SWEEP_REQUIRED = ["gamma_sigma2", "gamma_w", "min_test_err", "stable_rank",
                  "steps_to_min"]

# boundary lines drawable on the (gamma_sigma2, gamma_w) plane
BOUNDARY_LINES = {
    "lazy_active": ("gs2 + gw = 1", "black"),
    "finite_variance": ("2 gs2 + gw = 0", "crimson"),
    "overparametrized": ("gw = 1", "darkorange"),
}
DEFAULT_HEATMAP_LINES = ("lazy_active", "finite_variance", "overparametrized")


@dataclass
class PlotSpec:
    """What to render: inputs, figure kind, output path, overlays."""

    inputs: list[str]
    kind: str                      # "trajectory" | "heatmap"
    output: str
    threshold: float | None = None           # sigma^2 w line; sidecar wins if None
    k_signal: int | None = None              # colored singular values; sidecar wins
    lines: tuple[str, ...] = DEFAULT_HEATMAP_LINES


def _read_csv(path: str, required: list[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as err:
        raise SchemaError(f"cannot parse {path}: {err}") from err
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise MissingColumn(f"{path}: missing columns {missing}")
    if len(frame) == 0:
        raise SchemaError(f"{path}: no data rows")
    return frame


def _sidecar(path: str) -> dict:
    manifest = Path(path).with_suffix("").as_posix() + ".manifest.json"
    if Path(manifest).exists():
        try:
            with open(manifest) as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError):
            return {}
    return {}


def _sval_columns(frame: pd.DataFrame) -> list[str]:
    cols = [c for c in frame.columns if re.fullmatch(r"sv_\d+", c)]
    cols.sort(key=lambda c: int(c.split("_")[1]))
    if not cols:
        raise MissingColumn("trajectory CSV has no sv_* columns")
    return cols


def render_trajectory(spec: PlotSpec):
    """Two-panel figure: errors (left) and singular values (right).

    With two input runs the self-consistent one is drawn solid and the
    gradient-descent one dashed (sidecar manifests identify which is
    which; without them the inputs are taken as (self-consistent, gd)).
    """
    if not 1 <= len(spec.inputs) <= 2:
        raise SchemaError("trajectory figure takes one or two input CSVs")
    runs = []
    for path in spec.inputs:
        frame = _read_csv(path, TRAJECTORY_REQUIRED)
        _sval_columns(frame)
        runs.append((path, frame, _sidecar(path)))
    if len(runs) == 2:
        steps_a = runs[0][1]["step"].to_numpy()
        steps_b = runs[1][1]["step"].to_numpy()
        if len(steps_a) != len(steps_b) or np.any(steps_a != steps_b):
            raise SchemaError("the two runs do not share a recording schedule")
        modes = [r[2].get("mode") for r in runs]
        if modes[0] == "gd" or modes[1] == "self_consistent":
            runs.reverse()

    threshold = spec.threshold
    k_signal = spec.k_signal
    for _, _, manifest in runs:
        if threshold is None and "sigma2w" in manifest:
            threshold = float(manifest["sigma2w"])
        if k_signal is None and "K" in manifest:
            k_signal = int(manifest["K"])
    if k_signal is None:
        k_signal = 5

    fig, (ax_err, ax_sv) = plt.subplots(1, 2, figsize=(11, 4.2))
    styles = ["-", "--"]
    labels = ["self-consistent", "gd"] if len(runs) == 2 else [""]
    palette = plt.cm.tab10.colors

    for (path, frame, _), style, label in zip(runs, styles, labels):
        steps = frame["step"].to_numpy()
        mask = steps >= 1                   # log axis drops step 0
        tag = f" ({label})" if label else ""
        ax_err.loglog(steps[mask], frame["train_err"].to_numpy()[mask],
                      style, color="tab:blue", label="train" + tag)
        ax_err.loglog(steps[mask], frame["test_err"].to_numpy()[mask],
                      style, color="tab:red", label="test" + tag)
        sv_cols = _sval_columns(frame)
        for j, col in enumerate(sv_cols):
            if j < k_signal:
                color = palette[j % len(palette)]
                lw, alpha = 1.6, 1.0
            else:
                color, lw, alpha = "0.65", 0.9, 0.8
            ax_sv.loglog(steps[mask], frame[col].to_numpy()[mask], style,
                         color=color, lw=lw, alpha=alpha)

    if threshold is not None and threshold > 0:
        ax_sv.axhline(threshold, color="black", ls=":", lw=1.2,
                      label="sigma^2 w threshold")
        ax_sv.legend(loc="lower right", fontsize=8)
    ax_err.set_xlabel("step")
    ax_err.set_ylabel("error")
    ax_err.legend(fontsize=8)
    ax_sv.set_xlabel("step")
    ax_sv.set_ylabel("singular values")
    fig.tight_layout()
    fig.savefig(spec.output)
    plt.close(fig)
    return fig


def _grid(frame: pd.DataFrame, column: str):
    gs2 = np.sort(frame["gamma_sigma2"].unique())
    gw = np.sort(frame["gamma_w"].unique())
    grid = np.full((len(gw), len(gs2)), np.nan)
    pos_gs2 = {v: i for i, v in enumerate(gs2)}
    pos_gw = {v: i for i, v in enumerate(gw)}
    for _, row in frame.iterrows():
        value = row[column]
        grid[pos_gw[row["gamma_w"]], pos_gs2[row["gamma_sigma2"]]] = value
    return gs2, gw, grid


def _edges(values: np.ndarray) -> np.ndarray:
    if len(values) == 1:
        half = max(abs(values[0]) * 0.05, 0.05)
        return np.array([values[0] - half, values[0] + half])
    mids = 0.5 * (values[1:] + values[:-1])
    first = values[0] - (mids[0] - values[0])
    last = values[-1] + (values[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def _overlay_lines(ax, gs2: np.ndarray, gw: np.ndarray, names) -> None:
    xs = np.linspace(gs2.min(), gs2.max(), 64)
    lo, hi = gw.min(), gw.max()
    for name in names:
        if name not in BOUNDARY_LINES:
            raise SchemaError(f"unknown boundary line {name!r}")
        label, color = BOUNDARY_LINES[name]
        if name == "lazy_active":
            ys = 1.0 - xs
        elif name == "finite_variance":
            ys = -2.0 * xs
        else:
            ys = np.full_like(xs, 1.0)
        inside = (ys >= lo) & (ys <= hi)
        if inside.any():
            ax.plot(xs[inside], ys[inside], color=color, lw=1.4, label=label)


def render_heatmaps(spec: PlotSpec):
    """2x2 panel grid over (gamma_sigma2, gamma_w) from a sweep CSV.

    Panels: min test error (log scale), stable rank at argmin, steps to
    argmin, ln GD-vs-self-consistent distance; a placeholder replaces the
    distance panel when the sweep ran GD only.
    """
    if len(spec.inputs) != 1:
        raise SchemaError("heatmap figure takes exactly one sweep CSV")
    frame = _read_csv(spec.inputs[0], SWEEP_REQUIRED)

    panels = [
        ("min_test_err", "min test error", "log"),
        ("stable_rank", "stable rank at argmin", "linear"),
        ("steps_to_min", "steps to argmin", "linear"),
        ("ln_gd_sc_dist", "ln d^-2 ||A_gd - A_sc||_F^2 (time-avg)", "linear"),
    ]
    fig, axes = plt.subplots(2, 2, figsize=(10.5, 8))
    drew_legend = False
    for ax, (column, title, scale) in zip(axes.ravel(), panels):
        has_data = (column in frame.columns
                    and frame[column].notna().any())
        if not has_data:
            ax.text(0.5, 0.5, f"{column}\nnot recorded", ha="center",
                    va="center", transform=ax.transAxes, color="0.4")
            ax.set_title(title)
            ax.set_xticks([])
            ax.set_yticks([])
            continue
        gs2, gw, grid = _grid(frame, column)
        norm = None
        if scale == "log":
            positive = grid[np.isfinite(grid) & (grid > 0)]
            if positive.size:
                norm = LogNorm(vmin=positive.min(), vmax=positive.max())
        mesh = ax.pcolormesh(_edges(gs2), _edges(gw), grid, norm=norm,
                             cmap="viridis", shading="flat")
        fig.colorbar(mesh, ax=ax)
        _overlay_lines(ax, gs2, gw, spec.lines)
        if not drew_legend and ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=7, loc="lower left")
            drew_legend = True
        ax.set_title(title)
        ax.set_xlabel("gamma_sigma2")
        ax.set_ylabel("gamma_w")
    fig.tight_layout()
    fig.savefig(spec.output)
    plt.close(fig)
    return fig
