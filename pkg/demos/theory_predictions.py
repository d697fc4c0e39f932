"""The theory-side utilities: region flags, the gap constant c(a), the
predicted stopping time T*, and the diagnostics they feed.

Run:  python3 demos/theory_predictions.py
"""
import numpy as np

import lindyn as ld
from lindyn import metrics

# a deterministic two-block spectrum: three large values, two smaller ones
a = [2.0, 2.0, 2.0, 1.5, 1.5]
d = 100
task = ld.make_task_from_svals(d, a, seed=0)
scaling = ld.scaling_point(d, gamma_w=2.25, gamma_sigma2=-1.85,
                           a_star_op=task.a_star_op)

print("target spectrum s_i(A*)/d:", np.round(task.a_list, 3))
print("gap constant c(a) =", round(metrics.c_constant(task.a_list), 4))
delta = 1.0 - scaling.gamma_sigma2 - scaling.gamma_w
tstar = metrics.predict_tstar(scaling, task.a_list, scaling.eta)
print(f"delta = {delta:.2f}; predicted stopping time T* ~ {tstar:.0f} GD steps "
      "(leading order; the O(d log log d) remainder is dropped)")

blocks = metrics.signal_blocks(task)
print("\nsignal blocks (boundaries, per-block values):",
      blocks.boundaries, np.round(blocks.values, 2))
print("alignment x of A* with itself:",
      round(metrics.alignment_x(task.a_star, task).x, 12))
print("alignment x of -A* (anti-aligned, = 4K):",
      round(metrics.alignment_x(-task.a_star, task).x, 6))

# hidden-layer alignment at a fresh lazy initialization: near zero
state = ld.init_network(scaling, d, seed=0)
lhs, rhs = metrics.hidden_alignment(state, 1)
print(f"\nhidden alignment of the top singular pair at init: measured "
      f"{lhs:+.4f}, predicted s/sqrt(s^2+(s2w)^2) = {rhs:.4f}")

gap1, gap2, bound_a, bound_b = metrics.theorem1_gap(state)
print(f"factor-vs-square-root gaps at init: {gap1:.4f}, {gap2:.4f} vs "
      f"bound candidates ({bound_a:.4f}, {bound_b:.4f})")
