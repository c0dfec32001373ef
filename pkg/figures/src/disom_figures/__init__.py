"""Figure regeneration for distorted-OneMax experiment CSVs.

Reads trace.csv / median.csv / normalized.csv files produced by the
experiment runner and redraws the corresponding plots.  Consumes CSVs only:
this package never runs simulations and never recomputes statistics.
"""

from .io import (
    FigureDataError,
    FigureSchemaError,
    read_median,
    read_normalized,
    read_trace,
)
from .render import render_median, render_normalized, render_trajectory

__version__ = "0.1.0"
