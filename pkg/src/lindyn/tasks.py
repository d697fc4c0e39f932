"""Noisy low-rank recovery task, scaling-law parameters, cost and errors.

Randomness contract: every matrix is drawn from numpy's default generator
(PCG64) seeded through ``SeedSequence((seed, offset))`` with the fixed
offsets below, so one integer seed plus the shape parameters fully
determines the task and the network initialization, and changing the width
never changes the task.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import BadRank, DimensionMismatch

# Fixed sub-seed offsets; see module docstring.
SEED_TARGET = 0
SEED_NOISE = 1
SEED_W1 = 2
SEED_W2 = 3
SEED_SWEEP_CELL = 4

DEFAULT_C_LR = 50.0


def rng_for(seed: int, offset: int, *extra: int) -> np.random.Generator:
    """Deterministic generator for one role (target, noise, weights, ...)."""
    return np.random.default_rng(np.random.SeedSequence((seed, offset, *extra)))


@dataclass(frozen=True)
class Task:
    """Recovery target A*, observation noise E, and the cost they define."""

    d: int
    K: int
    seed: int
    a_star: np.ndarray
    noise: np.ndarray
    observed: np.ndarray          # cached B = A* + E
    target_svals: np.ndarray      # first K singular values of A*, descending
    target_svd: linalg.SvdTriple = field(repr=False)
    a_spec: tuple[float, ...] | None = None   # explicit spectrum, if deterministic

    @property
    def a_star_op(self) -> float:
        return float(self.target_svals[0])

    @property
    def a_list(self) -> np.ndarray:
        """Measured dimensionless target values a_i = s_i(A*) / d."""
        return self.target_svals / self.d


def _finish_task(d: int, K: int, seed: int, a_star: np.ndarray,
                 noise: np.ndarray,
                 a_spec: tuple[float, ...] | None = None) -> Task:
    svd = linalg.svd_desc(a_star)
    return Task(
        d=d, K=K, seed=seed,
        a_star=a_star, noise=noise, observed=a_star + noise,
        target_svals=svd.S[:K].copy(), target_svd=svd, a_spec=a_spec,
    )


def make_task(d: int, K: int, seed: int) -> Task:
    """Random rank-K target A* = K^{-1/2} sum_i u_i v_i^T plus i.i.d. noise.

    u_i, v_i are i.i.d. standard Gaussian vectors in R^d, so ||A*||_F is of
    order d; E has i.i.d. N(0, 1) entries.
    """
    if K < 1 or K > d:
        raise BadRank(f"rank K={K} outside [1, {d}]")
    rng_t = rng_for(seed, SEED_TARGET)
    u = rng_t.standard_normal((d, K))
    v = rng_t.standard_normal((d, K))
    a_star = (u @ v.T) / np.sqrt(K)
    noise = rng_for(seed, SEED_NOISE).standard_normal((d, d))
    return _finish_task(d, K, seed, a_star, noise)


def make_task_from_svals(d: int, a: Sequence[float], seed: int) -> Task:
    """Deterministic diagonal target with s_i(A*) = a_i * d, random noise.

    This is the fixed-spectrum variant the theory is stated for; it also
    allows repeated a_i, producing genuine multi-element signal blocks.
    """
    a = np.asarray(a, dtype=float)
    K = len(a)
    if K < 1 or K > d:
        raise BadRank(f"rank K={K} outside [1, {d}]")
    if np.any(np.diff(a) > 0) or np.any(a <= 0):
        raise BadRank("a-list must be positive and nonincreasing")
    a_star = np.zeros((d, d))
    a_star[np.arange(K), np.arange(K)] = a * d
    noise = rng_for(seed, SEED_NOISE).standard_normal((d, d))
    return _finish_task(d, K, seed, a_star, noise, a_spec=tuple(float(v) for v in a))


@dataclass(frozen=True)
class ScalingPoint:
    """One cell of the (gamma_sigma2, gamma_w) phase diagram.

    Width and variance derive from the exponents; region flags are always
    recomputed from the exponents, never stored.
    """

    d: int
    gamma_w: float
    gamma_sigma2: float
    w: int
    sigma2: float
    sigma2w: float                # cached product sigma^2 * w
    c_lr: float = DEFAULT_C_LR
    eta: float | None = None

    @property
    def is_lazy(self) -> bool:
        return self.gamma_sigma2 + self.gamma_w > 1.0

    @property
    def is_active(self) -> bool:
        return self.gamma_sigma2 + self.gamma_w < 1.0

    @property
    def is_boundary(self) -> bool:
        return self.gamma_sigma2 + self.gamma_w == 1.0

    @property
    def finite_variance(self) -> bool:
        # entrywise variance of W2 W1 at init is sigma^4 w = d^(2 gs2 + gw)
        return 2.0 * self.gamma_sigma2 + self.gamma_w <= 0.0

    @property
    def overparametrized(self) -> bool:
        return self.gamma_w >= 1.0

    @property
    def degenerate(self) -> bool:
        return self.gamma_w < 1.0 or 2.0 * self.gamma_sigma2 + self.gamma_w > 0.0

    def region_flags(self) -> dict[str, bool]:
        return {
            "lazy": self.is_lazy,
            "active": self.is_active,
            "boundary": self.is_boundary,
            "finite_variance": self.finite_variance,
            "overparametrized": self.overparametrized,
            "degenerate": self.degenerate,
        }


def scaling_point(d: int, gamma_w: float, gamma_sigma2: float,
                  c_lr: float = DEFAULT_C_LR,
                  a_star_op: float | None = None) -> ScalingPoint:
    """Derive (w, sigma^2, eta) from the exponents.

    w = max(1, round(d^gamma_w)), sigma^2 = d^gamma_sigma2. The learning
    rate follows the two-branch rule: eta = d^2 / (c_lr * sigma^2 w) in the
    lazy region (gamma_sigma2 + gamma_w > 1), else eta = d^2 /
    (c_lr * ||A*||_op), which needs the caller's task via ``a_star_op``;
    without it eta is left None until resolved.
    """
    if d < 2:
        raise DimensionMismatch(f"d={d} must be >= 2")
    w = max(1, round(d ** gamma_w))
    sigma2 = float(d) ** gamma_sigma2
    sigma2w = sigma2 * w
    if gamma_sigma2 + gamma_w > 1.0:
        eta = d * d / (c_lr * sigma2w)
    elif a_star_op is not None:
        eta = d * d / (c_lr * a_star_op)
    else:
        eta = None
    return ScalingPoint(d=d, gamma_w=gamma_w, gamma_sigma2=gamma_sigma2,
                        w=w, sigma2=sigma2, sigma2w=sigma2w, c_lr=c_lr,
                        eta=eta)


def grad_cost(A: np.ndarray, task: Task) -> np.ndarray:
    """Gradient of the train error: 2 d^{-2} (A - (A* + E))."""
    if A.shape != task.observed.shape:
        raise DimensionMismatch(f"A {A.shape} vs task {task.observed.shape}")
    return (2.0 / task.d ** 2) * (A - task.observed)


def eval_errors(A: np.ndarray, task: Task) -> tuple[float, float]:
    """(train, test) = d^{-2} (||A - (A*+E)||_F^2, ||A - A*||_F^2)."""
    if A.shape != task.observed.shape:
        raise DimensionMismatch(f"A {A.shape} vs task {task.observed.shape}")
    inv = 1.0 / task.d ** 2
    dtrain = A - task.observed
    dtest = A - task.a_star
    return inv * float(np.sum(dtrain * dtrain)), inv * float(np.sum(dtest * dtest))


def save_task(task: Task, path: str) -> None:
    """Binary dump (row-major arrays) with d, K, seed for reproducibility audits."""
    extra = {}
    if task.a_spec is not None:
        extra["a_spec"] = np.asarray(task.a_spec)
    np.savez(path, d=task.d, K=task.K, seed=task.seed,
             a_star=np.ascontiguousarray(task.a_star),
             noise=np.ascontiguousarray(task.noise), **extra)


def load_task(path: str) -> Task:
    with np.load(path) as data:
        a_spec = tuple(float(v) for v in data["a_spec"]) if "a_spec" in data else None
        return _finish_task(int(data["d"]), int(data["K"]), int(data["seed"]),
                            data["a_star"], data["noise"], a_spec=a_spec)
