"""Integrators for shallow linear-network training and run orchestration.

Four ways to evolve the represented matrix A = W2 W1:

* ``gd``: gradient descent on the factors (W1, W2). Besides the literal
  factor update there is an exact product-space form: the triple
  (A, C1, C2) = (W2 W1, W1^T W1, W2 W2^T) closes under the GD recursion,

      A'  = A  - eta (C2 G + G C1) + eta^2 G A^T G
      C1' = C1 - eta (A^T G + G^T A) + eta^2 G^T C2 G
      C2' = C2 - eta (G A^T + A G^T) + eta^2 G C1 G^T

  with G the cost gradient. This is plain algebra on the factor update
  (no approximation) and turns an O(w d^2) step into O(d^3), which is what
  makes wide-network runs (w ~ d^2.25) tractable on a desktop.
* ``self_consistent``: explicit Euler on
  A' = A - eta [sqrt(A A^T + (s2w)^2 I) G + G sqrt(A^T A + (s2w)^2 I)],
  with the same step size eta as GD so iteration counts are comparable.
* ``lazy``: A' = A - 2 eta s2w G, with closed form available.
* ``balanced``: the self-consistent update with s2w treated as 0. (Both
  terms carry the minus sign, matching the s2w -> 0 limit of the
  self-consistent form; one display of the balanced flow elsewhere has an
  inconsistent sign on the first term, which we do not follow.)

Each trajectory is strictly sequential; distinct trajectories are
independent and can run concurrently.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from ._version import __version__
from .errors import ConfigError, DimensionMismatch, Diverged
from .tasks import (SEED_W1, SEED_W2, ScalingPoint, Task, eval_errors,
                    grad_cost, rng_for)

MODES = ("gd", "self_consistent", "lazy", "balanced")

# Above this many MACs per factor-space matmul, gd runs in product space.
FACTOR_COST_CUTOFF = 5e7
# Dense w x w drift matrices are formed below this width; above it the
# operator norm is computed matrix-free.
DRIFT_DENSE_CUTOFF = 3000

SNAPSHOT_GROWTH = 1.5      # ~30 checkpoints over a 2e5-step run


@dataclass
class NetworkState:
    """Factor matrices of the network; the GD integrator's state."""

    W1: np.ndarray             # w x d
    W2: np.ndarray             # d x w
    step: int
    scaling: ScalingPoint


@dataclass
class ProductMatrix:
    """The d x d matrix evolved directly by the product-space integrators."""

    A: np.ndarray
    mode: str
    step: int
    scaling: ScalingPoint


def init_network(scaling: ScalingPoint, d: int, seed: int) -> NetworkState:
    """Entries of W1, W2 i.i.d. N(0, sigma^2), fully determined by seed."""
    sigma = np.sqrt(scaling.sigma2)
    W1 = sigma * rng_for(seed, SEED_W1).standard_normal((scaling.w, d))
    W2 = sigma * rng_for(seed, SEED_W2).standard_normal((d, scaling.w))
    return NetworkState(W1=W1, W2=W2, step=0, scaling=scaling)


def product(state: NetworkState) -> np.ndarray:
    """A = W2 W1."""
    return state.W2 @ state.W1


def gd_step(state: NetworkState, task: Task, eta: float) -> NetworkState:
    """One simultaneous gradient-descent step on (W1, W2).

    Both new factors are computed from the old pair:
    W1' = W1 - eta W2^T G, W2' = W2 - eta G W1^T with G = grad_cost(W2 W1).
    """
    G = grad_cost(product(state), task)
    W1n = state.W1 - eta * (state.W2.T @ G)
    W2n = state.W2 - eta * (G @ state.W1.T)
    if not (np.all(np.isfinite(W1n)) and np.all(np.isfinite(W2n))):
        raise Diverged(f"gd_step: non-finite factor entries at step {state.step + 1}")
    return NetworkState(W1=W1n, W2=W2n, step=state.step + 1, scaling=state.scaling)


def sc_step(pm: ProductMatrix, task: Task, eta: float) -> ProductMatrix:
    """Explicit Euler step of the self-consistent dynamics.

    Balanced mode runs the same update with the sigma^2 w shift set to 0.
    The two shifted square roots come from one SVD of A, which is exactly
    psd_sqrt of the shifted Gram matrices without forming the squares.
    """
    if pm.mode not in ("self_consistent", "balanced"):
        raise ConfigError(f"sc_step: mode {pm.mode!r} is not self_consistent/balanced")
    shift = 0.0 if pm.mode == "balanced" else pm.scaling.sigma2w
    G = grad_cost(pm.A, task)
    left, right = linalg.sqrt_gram_shifted(pm.A, shift)
    A_new = pm.A - eta * (left @ G + G @ right)
    if not np.all(np.isfinite(A_new)):
        raise Diverged(f"sc_step: non-finite entries at step {pm.step + 1}")
    return ProductMatrix(A=A_new, mode=pm.mode, step=pm.step + 1, scaling=pm.scaling)


def lazy_step(pm: ProductMatrix, task: Task, eta: float) -> ProductMatrix:
    """A' = A - 2 eta sigma^2 w grad_cost(A)."""
    if pm.mode != "lazy":
        raise ConfigError(f"lazy_step: mode {pm.mode!r} is not lazy")
    A_new = pm.A - (2.0 * eta * pm.scaling.sigma2w) * grad_cost(pm.A, task)
    if not np.all(np.isfinite(A_new)):
        raise Diverged(f"lazy_step: non-finite entries at step {pm.step + 1}")
    return ProductMatrix(A=A_new, mode="lazy", step=pm.step + 1, scaling=pm.scaling)


def lazy_closed_form(A0: np.ndarray, task: Task, scaling: ScalingPoint,
                     eta: float, t: int) -> np.ndarray:
    """A(t) = (A*+E) + (1 - 4 d^{-2} eta sigma^2 w)^t (A(0) - (A*+E))."""
    rho = 1.0 - 4.0 * eta * scaling.sigma2w / task.d ** 2
    if abs(rho) > 1.0:
        warnings.warn(f"lazy dynamics unstable: |1 - 4 eta s2w / d^2| = {abs(rho):.3g} > 1")
    if t == 0:
        return A0.copy()
    return task.observed + rho ** t * (A0 - task.observed)


def invariant_drift(state: NetworkState, state0: NetworkState) -> float:
    """Operator norm of (W2^T W2 - W1 W1^T)(t) minus its value at init.

    The w x w difference has rank at most 4d, so for large widths the norm
    is evaluated matrix-free instead of forming the w x w matrices.
    """
    if state.W1.shape != state0.W1.shape or state.W2.shape != state0.W2.shape:
        raise DimensionMismatch("invariant_drift: factor shapes differ")
    w = state.W1.shape[0]
    if w <= DRIFT_DENSE_CUTOFF:
        D = ((state.W2.T @ state.W2 - state0.W2.T @ state0.W2)
             - (state.W1 @ state.W1.T - state0.W1 @ state0.W1.T))
        return linalg.op_norm(D)
    from scipy.sparse.linalg import LinearOperator, eigsh

    def matvec(v):
        v = v.ravel()
        return ((state.W2.T @ (state.W2 @ v) - state0.W2.T @ (state0.W2 @ v))
                - (state.W1 @ (state.W1.T @ v) - state0.W1 @ (state0.W1.T @ v)))

    op = LinearOperator((w, w), matvec=matvec, dtype=float)
    vals = eigsh(op, k=1, which="LM", return_eigenvectors=False, tol=1e-9)
    return float(abs(vals[0]))


def gd_drift_identity(state: NetworkState, task: Task, eta: float) -> np.ndarray:
    """Exact per-step change of W2^T W2 - W1 W1^T: eta^2 (W1 G^T G W1^T - W2^T G G^T W2)."""
    G = grad_cost(product(state), task)
    return eta * eta * (state.W1 @ (G.T @ G) @ state.W1.T
                        - state.W2.T @ (G @ G.T) @ state.W2)


# ---------------------------------------------------------------------------
# trajectory orchestration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Everything needed to reproduce one trajectory."""

    task: Task
    scaling: ScalingPoint
    mode: str
    seed: int | None = None          # weight-init seed; defaults to task.seed
    eta: float | None = None         # defaults to scaling.eta
    max_steps: int | None = None     # default: 5*ceil(T*) if computable, else 1e6
    stop_tol: float | None = 1e-9    # plateau tolerance; None disables
    plateau_window: int = 50
    extra_tracked: int = 5           # singular values tracked = K + extra
    record_x: bool = True
    record_thm1: bool = False        # gd only
    record_drift: bool = False       # gd with factor implementation only
    snapshots: bool = False
    track_argmin_matrix: bool = False
    gd_impl: str = "auto"            # auto | factors | product
    dense_until: int = 200
    growth: float = 1.05
    check_monotone: bool = True

    def resolved_seed(self) -> int:
        return self.task.seed if self.seed is None else self.seed

    def resolved_eta(self) -> float:
        eta = self.scaling.eta if self.eta is None else self.eta
        if eta is None:
            raise ConfigError("learning rate unresolved: scaling has no eta and "
                              "none was supplied")
        return float(eta)


@dataclass
class TrajectoryRecord:
    """Time-stamped series of errors, singular values and diagnostics."""

    steps: np.ndarray
    train: np.ndarray
    test: np.ndarray
    svals: np.ndarray                     # n_rec x n_tracked
    x_align: np.ndarray | None
    thm1_gap1: np.ndarray | None
    thm1_gap2: np.ndarray | None
    thm1_bound_b: np.ndarray | None       # bound_a = sigma2w is constant
    inv_drift: np.ndarray | None
    snapshots: list[tuple[int, np.ndarray]]
    config: RunConfig
    eta: float
    stop_reason: str
    final_A: np.ndarray | None = field(default=None, repr=False)
    argmin_A: np.ndarray | None = field(default=None, repr=False)

    @property
    def argmin_test_index(self) -> int:
        return int(np.argmin(self.test))

    @property
    def argmin_test_step(self) -> int:
        return int(self.steps[self.argmin_test_index])

    @property
    def argmin_test_value(self) -> float:
        return float(self.test[self.argmin_test_index])

    def snapshot_dict(self) -> dict[int, np.ndarray]:
        return dict(self.snapshots)

    def manifest(self) -> dict:
        cfg, task, sc = self.config, self.config.task, self.config.scaling
        return {
            "d": task.d, "K": task.K, "seed": cfg.resolved_seed(),
            "task_seed": task.seed,
            "task_a_list": None if task.a_spec is None else list(task.a_spec),
            "gamma_w": sc.gamma_w, "gamma_sigma2": sc.gamma_sigma2,
            "w": sc.w, "sigma2": sc.sigma2, "sigma2w": sc.sigma2w,
            "c_lr": sc.c_lr, "eta": self.eta, "mode": cfg.mode,
            "max_steps": cfg.max_steps, "stop_tol": cfg.stop_tol,
            "plateau_window": cfg.plateau_window,
            "dense_until": cfg.dense_until, "growth": cfg.growth,
            "extra_tracked": cfg.extra_tracked,
            "stop_reason": self.stop_reason,
            "lindyn_version": __version__,
            "final_step": int(self.steps[-1]),
            "argmin_test_step": self.argmin_test_step,
            "argmin_test_value": self.argmin_test_value,
        }

    def to_csv(self, path: str) -> None:
        """One row per recorded step; empty fields where a metric was not kept."""
        import csv

        n_tracked = self.svals.shape[1]
        header = (["step", "train_err", "test_err"]
                  + [f"sv_{i + 1}" for i in range(n_tracked)]
                  + ["x_align", "thm1_gap", "inv_drift"])
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(header)
            for i, step in enumerate(self.steps):
                row = [int(step), repr(float(self.train[i])), repr(float(self.test[i]))]
                row += [repr(float(s)) for s in self.svals[i]]
                row.append("" if self.x_align is None else repr(float(self.x_align[i])))
                if self.thm1_gap1 is None:
                    row.append("")
                else:
                    row.append(repr(float(max(self.thm1_gap1[i], self.thm1_gap2[i]))))
                row.append("" if self.inv_drift is None else repr(float(self.inv_drift[i])))
                out.writerow(row)

    def write_manifest(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.manifest(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def recording_steps(dense_until: int = 200, growth: float = 1.05):
    """Yield the fixed recording schedule 0, 1, ..., dense then geometric.

    The sequence does not depend on the run length, so any two runs record
    at the same step indices up to truncation.
    """
    i = 0
    while True:
        yield i
        i = i + 1 if i < dense_until else int(np.ceil(growth * i))


def default_max_steps(task: Task, scaling: ScalingPoint, eta: float) -> int:
    """5 * ceil(T*) when the stopping-time prediction exists, else 1e6."""
    from . import metrics
    try:
        tstar = metrics.predict_tstar(scaling, task.a_list, eta)
    except Exception:
        return 1_000_000
    return int(5 * np.ceil(tstar))


def run_trajectory(config: RunConfig) -> TrajectoryRecord:
    """Run the configured integrator and record metrics on the schedule.

    The product-space integrators start from A(0) = W2(0) W1(0) built from
    the same seed as a GD run would use, so matched-seed comparisons share
    their initial condition. Stops at max_steps or when the relative
    train-error change over ``plateau_window`` consecutive recordings falls
    below stop_tol. Non-finite entries or a train-error increase (the GD
    monotonicity check) abort with Diverged carrying the partial record.
    """
    if config.mode not in MODES:
        raise ConfigError(f"unknown mode {config.mode!r}; expected one of {MODES}")
    task, scaling = config.task, config.scaling
    eta = config.resolved_eta()
    seed = config.resolved_seed()
    max_steps = config.max_steps
    if max_steps is None:
        max_steps = default_max_steps(task, scaling, eta)
    if max_steps < 0:
        raise ConfigError("max_steps must be >= 0")

    mode = config.mode
    use_factors = False
    if mode == "gd":
        impl = config.gd_impl
        if impl == "auto":
            impl = "factors" if scaling.w * task.d ** 2 <= FACTOR_COST_CUTOFF else "product"
        if config.record_drift and impl != "factors":
            raise ConfigError("invariant-drift recording needs gd_impl='factors'")
        use_factors = impl == "factors"

    state0 = init_network(scaling, task.d, seed)
    if use_factors:
        state = NetworkState(W1=state0.W1.copy(), W2=state0.W2.copy(),
                             step=0, scaling=scaling)
        A = product(state)
    else:
        A = state0.W2 @ state0.W1
        if mode == "gd":
            C1 = state0.W1.T @ state0.W1
            C2 = state0.W2 @ state0.W2.T
        state0 = None      # free the factors; product modes never need them

    n_tracked = min(task.d, task.K + config.extra_tracked)
    record_x = config.record_x
    record_thm1 = config.record_thm1 and mode == "gd"
    record_drift = config.record_drift and use_factors

    from . import metrics
    blocks = metrics.signal_blocks(task) if record_x else None

    steps_l, train_l, test_l, sval_l = [], [], [], []
    x_l, g1_l, g2_l, bb_l, drift_l = [], [], [], [], []
    snaps: list[tuple[int, np.ndarray]] = []
    next_snap = 0
    best: dict = {"test": np.inf, "A": None}

    B = task.observed
    grad_scale = 2.0 / task.d ** 2
    shift = scaling.sigma2w
    two_eta_s2w = 2.0 * eta * shift

    def build_record(reason: str) -> TrajectoryRecord:
        return TrajectoryRecord(
            steps=np.asarray(steps_l, dtype=int),
            train=np.asarray(train_l), test=np.asarray(test_l),
            svals=np.asarray(sval_l).reshape(len(steps_l), n_tracked),
            x_align=np.asarray(x_l) if record_x else None,
            thm1_gap1=np.asarray(g1_l) if record_thm1 else None,
            thm1_gap2=np.asarray(g2_l) if record_thm1 else None,
            thm1_bound_b=np.asarray(bb_l) if record_thm1 else None,
            inv_drift=np.asarray(drift_l) if record_drift else None,
            snapshots=snaps, config=config, eta=eta, stop_reason=reason,
            final_A=A.copy() if len(steps_l) else None,
            argmin_A=best["A"],
        )

    def record(step: int) -> None:
        nonlocal next_snap
        train, test = eval_errors(A, task)
        steps_l.append(step)
        train_l.append(train)
        test_l.append(test)
        if config.track_argmin_matrix and test < best["test"]:
            best["test"] = test
            best["A"] = A.copy()
        if record_x:
            svd = linalg.svd_desc(A)
            sval_l.append(svd.S[:n_tracked].copy())
            x_l.append(metrics.alignment_x_from_svd(svd, task, blocks).x)
        else:
            sval_l.append(np.linalg.svd(A, compute_uv=False)[:n_tracked].copy())
        if record_thm1:
            if use_factors:
                c1 = state.W1.T @ state.W1
                c2 = state.W2 @ state.W2.T
            else:
                c1, c2 = C1, C2
            gap1, gap2, _, bound_b = metrics.theorem1_gap_product(A, c1, c2, scaling)
            g1_l.append(gap1)
            g2_l.append(gap2)
            bb_l.append(bound_b)
        if record_drift:
            drift_l.append(invariant_drift(state, state0))
        if config.snapshots and step >= next_snap:
            snaps.append((step, A.copy()))
            next_snap = max(step + 1, int(np.ceil(SNAPSHOT_GROWTH * max(step, 1))))

    schedule = recording_steps(config.dense_until, config.growth)
    next(schedule)          # consume index 0, recorded explicitly
    step = 0
    record(0)
    next_record = next(schedule)
    prev_train = train_l[0]

    while step < max_steps:
        step += 1
        # one integrator step
        if mode == "gd" and use_factors:
            G = grad_scale * (A - B)
            W1n = state.W1 - eta * (state.W2.T @ G)
            W2n = state.W2 - eta * (G @ state.W1.T)
            state = NetworkState(W1=W1n, W2=W2n, step=step, scaling=scaling)
            A = product(state)
        elif mode == "gd":
            G = grad_scale * (A - B)
            C2G = C2 @ G
            GC1 = G @ C1
            P = A @ G.T            # P^T = G A^T
            Q = A.T @ G            # Q^T = G^T A
            A = A - eta * (C2G + GC1) + (eta * eta) * (P.T @ G)
            C1 = C1 - eta * (Q + Q.T) + (eta * eta) * (G.T @ C2G)
            C2 = C2 - eta * (P + P.T) + (eta * eta) * (GC1 @ G.T)
            C1 = 0.5 * (C1 + C1.T)
            C2 = 0.5 * (C2 + C2.T)
        elif mode == "lazy":
            A = A - two_eta_s2w * (grad_scale * (A - B))
        else:   # self_consistent / balanced
            s = 0.0 if mode == "balanced" else shift
            G = grad_scale * (A - B)
            left, right = linalg.sqrt_gram_shifted(A, s)
            A = A - eta * (left @ G + G @ right)

        if not np.all(np.isfinite(A)):
            raise Diverged(f"non-finite entries at step {step}",
                           record=build_record("diverged"))
        if config.check_monotone:
            diff = A - B
            train_now = grad_scale / 2.0 * float(np.sum(diff * diff))
            if train_now > prev_train * (1.0 + 1e-6) + 1e-300:
                raise Diverged(
                    f"train error increased at step {step} "
                    f"({prev_train:.6e} -> {train_now:.6e})",
                    record=build_record("diverged"))
            prev_train = train_now

        if step == next_record or step == max_steps:
            record(step)
            while next_record <= step:
                next_record = next(schedule)
            # plateau: relative train-error change across the window
            win = config.plateau_window
            if config.stop_tol is not None and len(train_l) > win:
                ref = train_l[-1 - win]
                change = abs(train_l[-1] - ref) / max(ref, 1e-300)
                if change < config.stop_tol:
                    return build_record("plateau")

    return build_record("max_steps" if max_steps > 0 else "zero_steps")
