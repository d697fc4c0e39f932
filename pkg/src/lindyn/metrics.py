"""Diagnostics for the training dynamics: alignment, gap bounds, timings.

All functions here are pure; they operate on immutable snapshots.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .dynamics import NetworkState, TrajectoryRecord, product
from .errors import (AllEqual, DegenerateTarget, DimensionMismatch,
                     NotActiveRegion, ZeroVector)
from .tasks import ScalingPoint, Task

BLOCK_REL_TOL = 1e-9


@dataclass(frozen=True)
class SignalBlocks:
    """Index boundaries grouping equal target singular values.

    boundaries = [n0=0, n1, ..., nm=K]; block k covers indices
    [boundaries[k], boundaries[k+1]).
    """

    boundaries: tuple[int, ...]
    values: tuple[float, ...]          # one target value per block

    @property
    def K(self) -> int:
        return self.boundaries[-1]

    @property
    def num_blocks(self) -> int:
        return len(self.boundaries) - 1

    def slices(self) -> list[slice]:
        b = self.boundaries
        return [slice(b[k], b[k + 1]) for k in range(self.num_blocks)]


def signal_blocks(task: Task, rel_tol: float = BLOCK_REL_TOL) -> SignalBlocks:
    """Group target singular values that agree within relative rel_tol."""
    s = task.target_svals
    if s[-1] <= 0.0 or not np.all(np.isfinite(s)):
        raise DegenerateTarget("target has a zero (or non-finite) signal singular value")
    boundaries = [0]
    values = []
    start = 0
    for i in range(1, len(s) + 1):
        if i == len(s) or abs(s[i] - s[start]) > rel_tol * abs(s[start]):
            boundaries.append(i)
            values.append(float(np.mean(s[start:i])))
            start = i
    return SignalBlocks(boundaries=tuple(boundaries), values=tuple(values))


@dataclass(frozen=True)
class AlignmentReport:
    """Alignment mismatch x in [0, 4K], with per-block contributions."""

    x: float
    block_contributions: tuple[float, ...]
    basis_note: str = "computed in the singular frame of the target matrix"


def alignment_x_from_svd(svd: linalg.SvdTriple, task: Task,
                         blocks: SignalBlocks | None = None) -> AlignmentReport:
    """Alignment metric given a precomputed SVD of A (see alignment_x)."""
    if blocks is None:
        blocks = signal_blocks(task)
    tsvd = task.target_svd
    U = tsvd.U.T @ svd.U          # rotate into the target's singular frame
    V = tsvd.V.T @ svd.V
    contributions = []
    for sl in blocks.slices():
        Uk = U[sl, sl]
        Vk = V[sl, sl]
        size = sl.stop - sl.start
        overlap = (float(np.sum(Uk * Uk)) + float(np.sum(Vk * Vk))
                   + 2.0 * float(np.sum(Uk * Vk)))
        contributions.append(4.0 * size - overlap)
    return AlignmentReport(x=float(sum(contributions)),
                           block_contributions=tuple(contributions))


def alignment_x(A: np.ndarray, task: Task,
                blocks: SignalBlocks | None = None) -> AlignmentReport:
    """4K minus the block-trace overlap of A's singular frame with A*'s.

    Zero at perfect positive alignment, 4K at anti-alignment. Evaluated in
    the basis where A* is diagonal, i.e. after rotating A's singular
    vectors by U*^T and V*^T.
    """
    return alignment_x_from_svd(linalg.svd_desc(A), task, blocks)


def theorem1_gap_product(A: np.ndarray, C1: np.ndarray, C2: np.ndarray,
                         scaling: ScalingPoint) -> tuple[float, float, float, float]:
    """Gaps between (C1, C2) and the shifted square roots, plus bound candidates.

    Returns (gap1, gap2, bound_a, bound_b) with
    gap1 = ||C1 - sqrt(A^T A + (s2w)^2 I)||_op,
    gap2 = ||C2 - sqrt(A A^T + (s2w)^2 I)||_op,
    bound_a = s2w and bound_b = sqrt(d/w) ||C1||_op (unit constants).
    """
    hat_c2, hat_c1 = linalg.sqrt_gram_shifted(A, scaling.sigma2w)
    gap1 = linalg.op_norm(C1 - hat_c1)
    gap2 = linalg.op_norm(C2 - hat_c2)
    bound_a = scaling.sigma2w
    bound_b = np.sqrt(scaling.d / scaling.w) * linalg.op_norm(C1)
    return gap1, gap2, float(bound_a), float(bound_b)


def theorem1_gap(state: NetworkState,
                 scaling: ScalingPoint | None = None) -> tuple[float, float, float, float]:
    """theorem1_gap_product evaluated on a factor state (C1 = W1^T W1 etc.)."""
    scaling = state.scaling if scaling is None else scaling
    A = product(state)
    return theorem1_gap_product(A, state.W1.T @ state.W1,
                                state.W2 @ state.W2.T, scaling)


def threshold_crossings(record: TrajectoryRecord,
                        scaling: ScalingPoint) -> list[tuple[int, int]]:
    """First recorded step where each tracked singular value exceeds sigma^2 w.

    Returns (singular index, crossing step) pairs, 1-based indices, sorted
    by crossing step; values that never cross are absent.
    """
    thr = scaling.sigma2w
    out = []
    for i in range(record.svals.shape[1]):
        above = np.nonzero(record.svals[:, i] > thr)[0]
        if len(above):
            out.append((i + 1, int(record.steps[above[0]])))
    out.sort(key=lambda pair: (pair[1], pair[0]))
    return out


def hidden_alignment(state: NetworkState, i: int) -> tuple[float, float]:
    """Normalized overlap of the hidden vectors against its predicted value.

    lhs = u_i^T W2 W1 v_i / (||W2^T u_i|| ||W1 v_i||) for the i-th singular
    pair of W2 W1 (1-based); rhs = s_i / sqrt(s_i^2 + (sigma^2 w)^2).
    """
    A = product(state)
    if not 1 <= i <= min(A.shape):
        raise DimensionMismatch(f"singular index {i} outside 1..{min(A.shape)}")
    svd = linalg.svd_desc(A)
    u = svd.U[:, i - 1]
    v = svd.V[:, i - 1]
    hid_out = state.W2.T @ u
    hid_in = state.W1 @ v
    n1 = float(np.linalg.norm(hid_out))
    n2 = float(np.linalg.norm(hid_in))
    if n1 < 1e-14 or n2 < 1e-14:
        raise ZeroVector(f"hidden vector norm below 1e-14 for index {i}")
    lhs = float(u @ A @ v) / (n1 * n2)
    s = float(svd.S[i - 1])
    s2w = state.scaling.sigma2w
    rhs = s / np.sqrt(s * s + s2w * s2w)
    return lhs, rhs


def ntk_apply(G: np.ndarray, state: NetworkState) -> np.ndarray:
    """Tangent-kernel map W2 W2^T G + G W1^T W1."""
    if G.shape != (state.W2.shape[0], state.W1.shape[1]):
        raise DimensionMismatch(f"G shape {G.shape} incompatible with factors")
    return state.W2 @ (state.W2.T @ G) + (G @ state.W1.T) @ state.W1


def c_constant(a: Sequence[float]) -> float:
    """min_{k,j: a_k != a_j} |a_k - a_j| * a_K^2 / max_{k,j: a_k != a_j} |a_k^2 - a_j^2|."""
    a = np.asarray(a, dtype=float)
    diffs = np.abs(a[:, None] - a[None, :])
    mask = diffs > 0
    if not mask.any():
        raise AllEqual("all target values equal; gap constant undefined")
    sq_diffs = np.abs(a[:, None] ** 2 - a[None, :] ** 2)
    return float(diffs[mask].min() * a[-1] ** 2 / sq_diffs[mask].max())


def predict_tstar(scaling: ScalingPoint, a: Sequence[float],
                  eta: float) -> float:
    """Leading-order stopping time of the active regime, in GD steps.

    (1/eta) (delta/a_K + 2 max(1, 2 delta)/c(a) + max(1, 2 delta)/(2 a_K))
    d log d, with delta = 1 - gamma_sigma2 - gamma_w > 0. The
    O(d log log d) remainder is omitted.
    """
    delta = 1.0 - scaling.gamma_sigma2 - scaling.gamma_w
    if delta <= 0.0:
        raise NotActiveRegion(f"delta = {delta:.3g} <= 0: not in the active region")
    a = np.asarray(a, dtype=float)
    c = c_constant(a)
    m = max(1.0, 2.0 * delta)
    a_k = float(a[-1])
    coeff = delta / a_k + 2.0 * m / c + m / (2.0 * a_k)
    return coeff * scaling.d * np.log(scaling.d) / eta
