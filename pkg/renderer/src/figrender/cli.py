"""Script entry point: figrender --input run.csv [--input run2.csv]
--kind trajectory|heatmap --output figure.png"""
from __future__ import annotations

import argparse
import sys

from .render import (DEFAULT_HEATMAP_LINES, PlotSpec, SchemaError,
                     render_heatmaps, render_trajectory)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figrender",
        description="Render trajectory or phase-diagram figures from "
                    "simulator CSV logs (PNG or SVG by output extension).")
    parser.add_argument("--input", action="append", required=True,
                        help="input CSV (repeat for a GD + self-consistent pair)")
    parser.add_argument("--kind", choices=["trajectory", "heatmap"],
                        required=True)
    parser.add_argument("--output", required=True, help="image path (.png/.svg)")
    parser.add_argument("--threshold", type=float,
                        help="sigma^2 w threshold line (default: from sidecar)")
    parser.add_argument("--k", type=int, dest="k_signal",
                        help="number of individually colored singular values")
    parser.add_argument("--lines", default=",".join(DEFAULT_HEATMAP_LINES),
                        help="comma-separated boundary lines for heatmaps "
                             "(lazy_active, finite_variance, overparametrized); "
                             "empty string for none")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    lines = tuple(s for s in args.lines.split(",") if s) if args.lines else ()
    spec = PlotSpec(inputs=args.input, kind=args.kind, output=args.output,
                    threshold=args.threshold, k_signal=args.k_signal,
                    lines=lines)
    try:
        if args.kind == "trajectory":
            render_trajectory(spec)
        else:
            render_heatmaps(spec)
    except SchemaError as err:
        print(f"schema error: {err}", file=sys.stderr)
        return 2
    print(args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
