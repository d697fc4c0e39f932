"""Figures from linear-network training CSV logs."""
from .render import (MissingColumn, PlotSpec, SchemaError, render_heatmaps,
                     render_trajectory)

__version__ = "0.1.0"

__all__ = ["MissingColumn", "PlotSpec", "SchemaError", "render_heatmaps",
           "render_trajectory"]
