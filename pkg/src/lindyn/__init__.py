"""Seedable simulator and verification suite for shallow linear-network
training dynamics: exact gradient descent on the factors, the
self-consistent product dynamics, lazy and balanced limits, and the
(gamma_sigma2, gamma_w) phase diagram for noisy low-rank matrix recovery.
"""
from . import errors
from ._version import __version__
from .dynamics import (NetworkState, ProductMatrix, RunConfig,
                       TrajectoryRecord, gd_step, init_network,
                       invariant_drift, lazy_closed_form, lazy_step, product,
                       run_trajectory, sc_step)
from .linalg import SvdTriple, psd_sqrt, stable_rank, svd_desc
from .metrics import (AlignmentReport, SignalBlocks, alignment_x, c_constant,
                      hidden_alignment, ntk_apply, predict_tstar,
                      signal_blocks, theorem1_gap, threshold_crossings)
from .sweep import (SweepCell, SweepConfig, export_sweep, gd_vs_sc_distance,
                    run_sweep)
from .tasks import (ScalingPoint, Task, eval_errors, grad_cost, load_task,
                    make_task, make_task_from_svals, save_task, scaling_point)

__all__ = [
    "errors",
    "NetworkState", "ProductMatrix", "RunConfig", "TrajectoryRecord",
    "gd_step", "init_network", "invariant_drift", "lazy_closed_form",
    "lazy_step", "product", "run_trajectory", "sc_step",
    "SvdTriple", "psd_sqrt", "stable_rank", "svd_desc",
    "AlignmentReport", "SignalBlocks", "alignment_x", "c_constant",
    "hidden_alignment", "ntk_apply", "predict_tstar", "signal_blocks",
    "theorem1_gap", "threshold_crossings",
    "SweepCell", "SweepConfig", "export_sweep", "gd_vs_sc_distance",
    "run_sweep",
    "ScalingPoint", "Task", "eval_errors", "grad_cost", "load_task",
    "make_task", "make_task_from_svals", "save_task", "scaling_point",
]
