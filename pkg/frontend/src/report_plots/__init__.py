"""Figure rendering for besovlab experiment artifacts (CSV in, PNG/SVG out)."""

from .plots import (
    FIGURE_KINDS,
    EmptyCsvWarning,
    MissingColumnError,
    PlotSpec,
    fit_power_law,
    read_columns,
    render,
)

__version__ = "0.1.0"
