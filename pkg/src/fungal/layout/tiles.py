"""Lane planning and tile construction.

Every cable (used input or embedded gate) owns one slot row for its whole
life.  Slots follow a single top-to-bottom order: inputs first, then each
gate is inserted just above its lower input.  Since insertions never
reorder existing cables, the order is consistent over time and cables only
change rows inside a tile, never across one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..circuit import CircuitDescription, GateType, cone, to_nand
from .composites import BRANCH_W, CrossingGeometry, Ctx, place_branch, place_crossing, place_nand
from .geometry import Group, check_clearance
from .nand import frame_for
from .sheet import JOG, Sheet


class UnknownSource(ValueError):
    """A gate reads a cable that is not live at that point of the layout."""


@dataclass(frozen=True)
class GateStep:
    """How the tile for gate ``g`` is built."""

    g: int
    upper: int
    lower: int
    crossed: tuple  # live cables strictly between upper and lower
    keep_upper: bool  # the upper input is read again later
    keep_lower: bool
    used: bool  # g itself is read later or is the output


@dataclass
class LanePlan:
    circuit: CircuitDescription
    inputs: tuple  # input gates that get a cable
    steps: list
    order: list  # every cable, top to bottom
    output: int
    pruned: bool
    last: dict = field(default_factory=dict)

    @property
    def rank(self):
        return {c: i for i, c in enumerate(self.order)}

    @property
    def crossings(self):
        return sum(len(s.crossed) for s in self.steps)


def plan_lanes(cd: CircuitDescription, prune: bool = True) -> LanePlan:
    """Decide slot order, crossings and cable lifetimes for ``cd``.

    With ``prune`` only gates in the output's cone are embedded.
    Non-NAND gates are rewritten first.
    """
    if any(x.t not in (GateType.INPUT, GateType.NAND) for x in cd):
        cd = to_nand(cd)
    keep = cone(cd) if prune else {x.g for x in cd}
    gates = [x for x in cd.logic() if x.g in keep]
    out = cd.output_gate
    last = {out: float("inf")}
    for x in gates:
        for s in (x.g1, x.g2):
            last[s] = max(last.get(s, 0), x.g)
    inputs = tuple(x.g for x in cd.gates[: cd.n] if x.g in last)
    order = list(inputs)
    live = list(inputs)
    steps = []
    for x in gates:
        for s in (x.g1, x.g2):
            if s not in live:
                raise UnknownSource(f"gate {x.g} reads cable {s}, which is not live")
        pos = {c: i for i, c in enumerate(order)}
        u, w = sorted((x.g1, x.g2), key=pos.__getitem__)
        between = tuple(c for c in live if pos[u] < pos[c] < pos[w])
        steps.append(GateStep(x.g, u, w, between, last[u] > x.g, last[w] > x.g, x.g in last))
        order.insert(order.index(w), x.g)
        live = [c for c in order if c in live and last[c] > x.g]
        if x.g in last:
            live = [c for c in order if c in live or c == x.g]
    return LanePlan(cd, inputs, steps, order, out, prune, last)


@dataclass(frozen=True)
class TileGeometry:
    """Slot pitch and margins for one delay cap."""

    D: int

    @property
    def frame(self):
        return frame_for(self.D)

    @property
    def crossing(self):
        return CrossingGeometry(self.frame)

    @property
    def pitch(self):
        c, hm = self.crossing, self.frame.height
        return max(c.b_in + 5, c.height - c.b_in + 3, hm + 4, c.q_out - c.b_in + 10)

    @property
    def top(self):
        return self.frame.height + 6

    def row(self, rank):
        return self.top + rank * self.pitch

    def height(self, n_slots):
        return self.top + (n_slots + 1) * self.pitch


class TileBuilder:
    """Builds the tile for one gate on a Sheet, stage by stage, left to right."""

    def __init__(self, sheet: Sheet, ctx: Ctx, geo: TileGeometry):
        self.s, self.ctx, self.geo = sheet, ctx, geo
        self.col = 0

    def channel(self, jogs=None):
        """Advance every live cable by one jog channel, moving ``jogs`` to new rows."""
        jogs = jogs or {}
        to = self.col + JOG
        for name in list(self.s.cur):
            self.s.route(name, to, jogs.get(name))
        self.col = to

    def advance(self, to):
        for name in list(self.s.cur):
            if self.s.cur[name].col < to:
                self.s.route(name, to)
        self.col = to

    def rename(self, old, new):
        self.s.rename(old, new)

    def branch(self, top, x, a, b):
        place_branch(self.s, self.ctx, top, self.col, x, a, b)
        self.advance(self.col + BRANCH_W)

    def crossing(self, top, a, b, p, q):
        g = place_crossing(self.s, self.ctx, top, self.col, a, b, p, q)
        self.advance(self.col + g.box.w)

    def nand(self, top, x, y, z):
        g = place_nand(self.s, self.ctx, top, self.col, x, y, z)
        self.advance(self.col + g.box.w)

    def gate(self, st: GateStep, rows: dict):
        """Stages for one gate; ``rows`` maps cable names to slot rows."""
        f, cg = self.geo.frame, self.geo.crossing
        X, Y, hm = f.rows["xp"], f.rows["yp"], f.height
        u, w, g = cable(st.upper), cable(st.lower), cable(st.g)
        ru, rw = rows[u], rows[w]
        if u != w:
            if st.keep_upper:
                self.channel({u: ru + 1})
                self.branch(ru - 1, u, u, "_t")
            else:
                self.rename(u, "_t")
            for c in map(cable, st.crossed):
                top = rows[c] - cg.b_in
                self.channel({"_t": top + cg.a_in})
                self.crossing(top, "_t", c, c, "_t")
                self.channel({c: rows[c]})
            if st.keep_lower:
                self.channel({w: rw - 3})
                self.branch(rw - 5, w, "_w", w)
            else:
                self.rename(w, "_w")
            t_n = rw - hm
            self.channel({"_t": t_n + X, "_w": t_n + Y})
        else:
            if st.keep_upper:
                self.channel({u: ru - 3})
                self.branch(ru - 5, u, "_c", u)
            else:
                self.rename(u, "_c")
            t_n = ru - hm
            self.channel({"_c": t_n + X + 1})
            self.branch(t_n + X - 1, "_c", "_t", "_w")
            self.channel({"_w": t_n + Y})
        self.nand(t_n, "_t", "_w", "_g")
        self.channel({"_g": rows[g]})
        self.rename("_g", g)
        if not st.used:
            self.s.end(g)


def cable(c: int) -> str:
    """Sheet name of the cable carrying gate ``c``."""
    return f"c{c}"


def iter_tiles(plan: LanePlan, bits, ctx: Ctx, check: bool = False):
    """Yield the tiles left to right, one Group each.

    Tile ``i`` implements ``plan.steps[i]``; the first tile also holds the
    input signals.  With no gates the single tile is the input cable itself.
    Each tile's ``meta['out']`` bounds its output cables.
    """
    geo = TileGeometry(ctx.D)
    rank = plan.rank
    rows = {cable(c): geo.row(rank[c]) for c in plan.order}
    height = geo.height(len(plan.order))
    bounds = None
    for st in plan.steps or [None]:
        s = Sheet(f"tile{st.g if st else 0}", height)
        if bounds is None:
            for c in plan.inputs:
                s.source(cable(c), rows[cable(c)], bits[c - 1])
        else:
            for c, b in bounds.items():
                s.input(c, rows[c], b)
        tb = TileBuilder(s, ctx, geo)
        if st is not None:
            tb.gate(st, rows)
        live = list(s.cur)
        tb.advance(tb.col + 2)
        g = s.finish({c: c for c in live}, width=tb.col + 1)
        g.meta["gate"] = st.g if st else None
        if check:
            check_clearance(g, opaque=True)
        bounds = dict(g.meta["out"])
        yield g


def build_tiles(plan: LanePlan, bits, ctx: Ctx, check: bool = False):
    """All tiles, plus the output cable's row and arrival bound at the right edge."""
    tiles = list(iter_tiles(plan, bits, ctx, check))
    geo = TileGeometry(ctx.D)
    out = cable(plan.output)
    return tiles, geo.row(plan.rank[plan.output]), tiles[-1].meta["out"][out], geo


def build_tile(plan: LanePlan, i: int, bits, ctx: Ctx) -> Group:
    """Tile ``i`` (1-based) alone; earlier tiles are built only for their timing."""
    if not 1 <= i <= max(len(plan.steps), 1):
        raise IndexError(f"no tile {i}")
    for j, t in enumerate(iter_tiles(plan, bits, ctx), 1):
        if j == i:
            return t


def need_of(tiles) -> int:
    return max((t.meta.get("need", 0) for t in tiles), default=0)


def assemble(tiles, height) -> Group:
    F = Group(name="embedding")
    col = 0
    for t in tiles:
        F.add(t, 0, col)
        col += t.box.w
    F.size = (height, col + 1)
    return F
