"""Sweep the (gamma_sigma2, gamma_w) plane and see the lazy/active
transition appear in the minimal test error.

A small grid at d=40 runs in about a minute. Cells with
gamma_sigma2 + gamma_w > 1 converge to the noisy observations and keep a
high test error; cells below the line recover the low-rank target.

Run:  python3 demos/phase_diagram.py
"""
import numpy as np

import lindyn as ld

config = ld.SweepConfig(d=40, K=3, seed=1,
                        gs2_min=-2.2, gs2_max=-0.4, gs2_count=4,
                        gw_min=1.4, gw_max=2.4, gw_count=3,
                        max_steps=2000, stop_tol=1e-9, workers=2)
cells = ld.run_sweep(config)

print("min test error over the grid (rows: gamma_sigma2, cols: gamma_w)")
header = "".join(f"  gw={gw:4.2f}" for gw in config.gw_values())
print(" " * 12 + header)
for row in cells:
    line = f"gs2={row[0].gamma_sigma2:+5.2f}  "
    for cell in row:
        marker = "*" if cell.gamma_sigma2 + cell.gamma_w < 1 else " "
        line += f"  {cell.min_test_err:6.3f}{marker}"
    print(line)
print("(* = active region, gamma_sigma2 + gamma_w < 1)")

ld.export_sweep(cells, "runs_demo_sweep.csv", config,
                "runs_demo_sweep.manifest.json")
print("\nwrote runs_demo_sweep.csv; render the 2x2 heatmap panel with\n"
      "  figrender --input runs_demo_sweep.csv --kind heatmap "
      "--output runs_demo_sweep.png")
