"""Fungal automaton engine: configurations, stepping and traces."""

from .config import Configuration, parse_grid, row_text
from .run import HV, Axis, CellState, Trace, UpdateSequence, cycle, grain_sum, is_stable, run, step

__all__ = [
    "Axis", "CellState", "Configuration", "HV", "Trace", "UpdateSequence",
    "cycle", "grain_sum", "is_stable", "parse_grid", "row_text", "run", "step",
]
