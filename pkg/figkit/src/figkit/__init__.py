"""figkit: turn flockkit CSV outputs into publication-style figures.

The tool never recomputes physics; every number in a figure is read from
the CSV files written by the solver CLI.  All rendering is deterministic:
fixed styles, fixed dpi, no timestamps in image metadata.
"""

from .io import SchemaError, read_diag, read_series, read_snapshot, read_table
from .jobs import (
    FigureJob,
    plot_contour_pair,
    plot_momentum_comparison,
    plot_series,
    render_table,
    run_all,
)

__all__ = [
    "FigureJob",
    "SchemaError",
    "plot_contour_pair",
    "plot_momentum_comparison",
    "plot_series",
    "read_diag",
    "read_series",
    "read_snapshot",
    "read_table",
    "render_table",
    "run_all",
]
