"""Compile NAND circuits into fungal-automaton configurations."""

from .compile import (
    C_BUDGET, DelayBudget, Embedding, compile, emit_columns, fit_cap, plan_delays, query_cell,
)
from .composites import (
    BRANCH_H, BRANCH_W, CrossingGeometry, Ctx, XorGeometry, build_branch, build_crossing, build_xor,
)
from .geometry import Box, ClearanceError, Group, Lazy, Snake, Source, Stamp, Wire, check_clearance
from .nand import MARGIN, MIN_CAP, BudgetExceeded, NandFrame, build_nand, frame_for, nand_delays
from .sheet import JOG, Cursor, RoutingError, Sheet, cable_wires
from .tiles import (
    GateStep, LanePlan, TileGeometry, UnknownSource, build_tile, build_tiles, iter_tiles, plan_lanes,
)

__all__ = [
    "BRANCH_H", "BRANCH_W", "Box", "BudgetExceeded", "C_BUDGET", "ClearanceError", "CrossingGeometry",
    "Ctx", "Cursor", "DelayBudget", "Embedding", "GateStep", "Group", "JOG", "LanePlan", "Lazy",
    "MARGIN", "MIN_CAP", "NandFrame", "RoutingError", "Sheet", "Snake", "Source", "Stamp",
    "TileGeometry", "UnknownSource", "Wire", "XorGeometry", "build_branch", "build_crossing",
    "build_nand", "build_tile", "build_tiles", "build_xor", "cable_wires", "check_clearance",
    "compile", "emit_columns", "fit_cap", "frame_for", "iter_tiles", "nand_delays", "plan_delays",
    "plan_lanes", "query_cell",
]
