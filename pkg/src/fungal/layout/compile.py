"""From a CVP instance to a prediction instance (F, y, T).

The embedding is a row of tiles, one per embedded gate, with no gap
between them.  Tiles are built with Lazy composites, so a compiled layout
is a few hundred parts per tile; cells are drawn only when painted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..circuit import CvpInstance
from ..engine import Configuration
from .composites import Ctx
from .geometry import Group
from .nand import MIN_CAP, BudgetExceeded
from .tiles import LanePlan, TileGeometry, assemble, build_tiles, iter_tiles, need_of, plan_lanes

SEGMENT = 1 << 20  # cells in the drawing buffer of emit_columns


@dataclass
class Embedding:
    """The compiled layout and the prediction instance it defines."""

    layout: Group
    y: tuple  # probe cell (row, col)
    T: int
    D: int
    plan: LanePlan
    bits: tuple
    out_bound: int  # cycle bound for the output signal reaching the probe
    tiles: list = field(repr=False, default_factory=list)

    @property
    def shape(self):
        h, w = self.layout.size
        return 2 * h, 2 * w

    @cached_property
    def F(self) -> Configuration:
        cfg = Configuration()
        self.layout.paint_into(cfg)
        return cfg

    def to_array(self) -> np.ndarray:
        return self.layout.cells()


@dataclass(frozen=True)
class DelayBudget:
    """Delay cap D for circuits of ``m`` gates, from D >= c m^2 sqrt(D)."""

    m: int
    c: float
    D: int

    def satisfied(self) -> bool:
        return self.D >= self.c * self.m ** 2 * math.sqrt(self.D)


# sqrt(D* / m^4) peaks at sqrt(330), for a single NAND of two inputs, over
# thousands of compiled circuits with n <= 3, m <= 8; twice that for margin
C_BUDGET = 2 * math.sqrt(330.0)


def plan_delays(m: int, c: float = C_BUDGET) -> DelayBudget:
    if m < 1:
        raise ValueError("m must be at least 1")
    return DelayBudget(m, c, max(MIN_CAP, math.ceil((c * m * m) ** 2)))


def fit_cap(plan: LanePlan, registry=None, start: int = MIN_CAP) -> int:
    """Smallest fixed point D of 'every retarder fits in a box for cap D'.

    Timing does not depend on the input bits, so any bits will do.
    """
    bits = (0,) * plan.circuit.n
    D = start
    while True:
        need = max(t.meta.get("need", 0) for t in iter_tiles(plan, bits, Ctx(D, registry, dry=True)))
        if need <= D:
            return D
        D = need


def _prepare(inst, prune, D, registry):
    plan = plan_lanes(inst.circuit, prune)
    if D is None:
        D = fit_cap(plan, registry)
        budget = plan_delays(max(plan.circuit.m, 1))
        if D > budget.D:
            raise BudgetExceeded(f"layout needs D={D}, above the planned budget {budget.D}")
    return plan, D


def compile(inst: CvpInstance, *, prune: bool = True, D: int | None = None, registry=None,
            check: bool = False) -> Embedding:
    """Lay out ``inst`` so that probe y fires iff the circuit outputs 1.

    ``D`` defaults to the least cap that works for this circuit.  With
    ``check`` every tile is clearance-checked against its composites.
    """
    plan, D = _prepare(inst, prune, D, registry)
    tiles, row, bound, geo = build_tiles(plan, inst.input_bits, Ctx(D, registry, dry=True), check)
    if need_of(tiles) > D:
        raise BudgetExceeded(f"layout needs D={need_of(tiles)}, got {D}")
    F = assemble(tiles, geo.height(len(plan.order)))
    h, w = F.size
    y = (2 * row + 1, 2 * (w - 1))  # next to the last block of the output's positive wire
    return Embedding(F, y, 4 * h * w, D, plan, tuple(inst.input_bits), bound, tiles)


def query_cell(inst: CvpInstance, coord, emb: Embedding | None = None) -> int:
    """State of cell ``coord`` of F, drawing only the parts that cover it."""
    emb = emb or compile(inst)
    r, c = coord
    h, w = emb.shape
    if not (0 <= r < h and 0 <= c < w):
        return 0
    return int(emb.layout.render(r, c, 1, 1)[0, 0])


def emit_columns(inst: CvpInstance, emb: Embedding | None = None, *, prune: bool = True,
                 D: int | None = None, registry=None, segment: int = SEGMENT):
    """Yield (col, row0, cells) chunks of F column by column, left to right.

    All drawing goes through one buffer of ``segment`` cells, so the
    chunks are views that the next chunk overwrites: copy what you keep.
    Without ``emb`` the tiles are built one at a time and composites are
    drawn on demand, so memory does not grow with the size of F.
    """
    if emb is not None:
        tiles, h = emb.tiles, emb.shape[0]
    else:
        plan, D = _prepare(inst, prune, D, registry)
        tiles = iter_tiles(plan, inst.input_bits, Ctx(D, registry, dry=True))
        h = 2 * TileGeometry(D).height(len(plan.order))
    buf = np.zeros(segment, np.uint8)
    rows = min(h, segment)
    per = max(1, segment // h)  # whole columns per paint when they fit
    col = 0
    for t in _with_margin(tiles):
        tw = 2 * t.box.w if t is not None else 2
        for c0 in range(0, tw, per):
            k = min(per, tw - c0)
            for r0 in range(0, h, rows):
                n = min(rows, h - r0)
                win = buf[: n * k].reshape(n, k)
                win[:] = 0
                if t is not None:
                    t.paint(win, r0, c0)
                for j in range(k):
                    yield col + c0 + j, r0, win[:, j]
                if k > 1:
                    break
        col += tw


def _with_margin(tiles):
    yield from tiles
    yield None  # the probe's margin column
