"""Cable-level composites: Boolean branch, XOR and cable crossing.

Each builder takes the arrival bounds of its input cables and returns a
Group whose ``meta['out']`` bounds its output cables.  Rows and columns
are in blocks relative to the composite's top-left corner; a cable port
named ``x`` is the pair ``xp`` (positive wire) over ``xm``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..components import MINUS, PLUS, Port, Role, Side, default_registry
from .geometry import Group, Lazy, Stamp, Wire, check_clearance
from .nand import NandFrame, build_nand, frame_for
from .sheet import JOG, Sheet
from .timing import HOP, path

BRANCH_H, BRANCH_W = 9, 16


def _cable_ports(g, name, role, row, col):
    side = Side.LEFT if role is Role.INPUT else Side.RIGHT
    g.ports[name + "p"] = Port(name + "p", role, PLUS, side, row, col)
    g.ports[name + "m"] = Port(name + "m", role, MINUS, side, row + 2, col)


def build_branch(bound: int = 0, registry=None, check=False) -> Group:
    """One cable in (rows 2/4), two copies out: A on rows 1/3, B on rows 5/7.

    Two duplications, one per polarity, then a semicrossing swaps the
    middle wires so that each copy is a proper cable again.
    """
    reg = registry or default_registry()
    g = Group(name="branch", size=(BRANCH_H, BRANCH_W))
    w = {
        "in_p": Wire((2, 0), [("R", 4)]),
        "in_m": Wire((4, 0), [("R", 1), ("D", 2), ("R", 3)]),
        "Ap": Wire((1, 9), [("R", 6)]),
        "to_x_p": Wire((3, 9), [("R", 1)]),
        "to_x_m": Wire((5, 9), [("R", 1)]),
        "Bm": Wire((7, 9), [("R", 6)]),
        "Am": Wire((3, 14), [("R", 1)]),
        "Bp": Wire((5, 14), [("R", 1)]),
    }
    g.add(Stamp(reg.get("dup_plus"), 1, 5))
    g.add(Stamp(reg.get("dup_minus"), 5, 5))
    g.add(Stamp(reg.get("semicross_plus"), 3, 11))
    for x in w.values():
        g.add(x)
    _cable_ports(g, "x", Role.INPUT, 2, 0)
    _cable_ports(g, "A", Role.OUTPUT, 1, BRANCH_W - 1)
    _cable_ports(g, "B", Role.OUTPUT, 5, BRANCH_W - 1)
    dp, dm = ("dup_plus", "x", "z1"), ("dup_minus", "x", "z2")
    spans = {
        "Ap": path(w["in_p"], HOP, dp, w["Ap"]),
        "Bp": path(w["in_p"], HOP, ("dup_plus", "x", "z2"), w["to_x_p"], HOP,
                   ("semicross_plus", "p_in", "p_out"), w["Bp"]),
        "Am": path(w["in_m"], HOP, dm, w["to_x_m"], HOP, ("semicross_plus", "m_in", "m_out"), w["Am"]),
        "Bm": path(w["in_m"], HOP, ("dup_minus", "x", "z1"), w["Bm"]),
    }
    g.meta["bounds"] = {"x": bound}
    g.meta["out"] = {c: bound + max(spans[c + "p"].hi, spans[c + "m"].hi) + 1 for c in "AB"}
    if check:
        check_clearance(g)
    return g


@dataclass(frozen=True)
class Ctx:
    """What every builder below needs: the delay cap, the registry and the dry flag.

    Dry builds place Lazy composites: same ports and timing, parts drawn
    only when painted.
    """

    D: int
    registry: object = None
    dry: bool = False

    @property
    def reg(self):
        return self.registry or default_registry()


def _cable_proto(name, size, ins, outs):
    """Ports-only stand-in used to route cables before the real element is built."""
    g = Group(name=name, size=size)
    for prefix, (row, col) in ins.items():
        _cable_ports(g, prefix, Role.INPUT, row, col)
    for prefix, (row, col) in outs.items():
        _cable_ports(g, prefix, Role.OUTPUT, row, col)
    return g


def _need(sheet: Sheet, g: Group):
    sheet.group.meta["need"] = max(sheet.group.meta.get("need", 0), g.meta.get("need", 0))


def place_nand(sheet: Sheet, ctx: Ctx, top, left, x, y, z):
    """Route cables ``x``, ``y`` into a NAND at (top, left) and start cable ``z`` at its output."""
    f = frame_for(ctx.D)
    r = f.rows
    proto = _cable_proto("nand", (f.height, f.width), {"x": (r["xp"], 0), "y": (r["yp"], 0)},
                         {"z": (r["zp"], f.width - 1)})
    bounds = sheet.connect(proto, top, left, {"x": x, "y": y})
    g = build_nand(bounds["x"], bounds["y"], D=ctx.D, registry=ctx.registry, check=False, dry=ctx.dry)
    if ctx.dry:
        g = Lazy(_nand, (bounds["x"], bounds["y"], ctx.D, ctx.registry), g)
    sheet.place(g, top, left, {"x": x, "y": y}, {"z": z}, route=False)
    _need(sheet, g)
    return g


def place_branch(sheet: Sheet, ctx: Ctx, top, left, x, a, b):
    """Branch cable ``x`` into copies ``a`` (upper) and ``b``; x jogs onto row top + 2 first."""
    bound = sheet.route(x, left, top + 2).bound
    g = build_branch(bound, ctx.registry) if not ctx.dry else Lazy(build_branch, (bound, ctx.registry),
                                                                   _branch_shell(bound))
    sheet.place(g, top, left, {"x": x}, {"A": a, "B": b}, route=False)
    return g


def _nand(bx, by, D, registry):
    return build_nand(bx, by, D=D, registry=registry, check=False)


@lru_cache(maxsize=None)
def _branch_timing():
    return build_branch(0).meta["out"]


def _branch_shell(bound):
    g = _cable_proto("branch", (BRANCH_H, BRANCH_W), {"x": (2, 0)},
                     {"A": (1, BRANCH_W - 1), "B": (5, BRANCH_W - 1)})
    g.meta.update(bounds={"x": bound}, out={k: bound + v for k, v in _branch_timing().items()})
    return g


class XorGeometry:
    """Rows and columns of the 4-NAND XOR for one NAND frame.

    NAND p sits in the top half and q in the bottom half; n sits between
    them, shifted down so that the copy of u bound for p clears it.
    """

    def __init__(self, f: NandFrame):
        hm, wm = f.height, f.width
        X, Y, Z = f.rows["xp"], f.rows["yp"], f.rows["zp"]
        assert Y - X >= 5 and Z >= X
        self.f = f
        self.t_n, self.t_q, self.t_o = X + 3, hm, Z - X
        self.u = self.t_n + X - 3
        self.v = self.t_n + Y + 1
        self.z = self.t_o + Z
        self.height = 2 * hm
        self.n_col = BRANCH_W + JOG
        self.bn_col = self.n_col + wm + JOG
        self.pq_col = self.bn_col + BRANCH_W + JOG
        self.o_col = self.pq_col + wm + JOG
        self.width = self.o_col + wm + 1


def build_xor(bu: int, bv: int, D: int, registry=None, check=False, dry=False) -> Group:
    """z = u XOR v as NAND(NAND(u, n), NAND(n, v)) with n = NAND(u, v)."""
    ctx = Ctx(D, registry, dry)
    f = frame_for(D)
    x = XorGeometry(f)
    X, Y = f.rows["xp"], f.rows["yp"]
    s = Sheet("xor", x.height, x.width)
    s.input("u", x.u, bu)
    s.input("v", x.v, bv)
    place_branch(s, ctx, x.u - 2, 0, "u", "u1", "u2")
    place_branch(s, ctx, x.v - 2, 0, "v", "v1", "v2")
    # copies bound for the second layer go around NAND n
    s.route("u1", x.n_col, X)
    s.route("v2", x.n_col, x.t_q + Y)
    place_nand(s, ctx, x.t_n, x.n_col, "u2", "v1", "n")
    place_branch(s, ctx, Y - 1, x.bn_col, "n", "n1", "n2")  # n1 lands on p's y row
    s.route("u1", x.pq_col)
    s.route("v2", x.pq_col)
    place_nand(s, ctx, 0, x.pq_col, "u1", "n1", "p")
    place_nand(s, ctx, x.t_q, x.pq_col, "n2", "v2", "q")
    place_nand(s, ctx, x.t_o, x.o_col, "p", "q", "z")
    g = s.finish({"z": "z"})
    g.meta["bounds"] = {"u": bu, "v": bv}
    if check:
        check_clearance(g, opaque=True)
    return g


class CrossingGeometry:
    def __init__(self, f: NandFrame):
        xg = XorGeometry(f)
        self.xor = xg
        self.t1 = xg.u + 3                  # first XOR
        self.t3 = xg.height                 # lower XOR of the second layer
        self.a_in = self.t1 + xg.u - 3
        self.b_in = self.t1 + xg.v + 1
        self.p_out = xg.z
        self.q_out = self.t3 + xg.z
        self.height = self.t3 + xg.height
        self.x1_col = BRANCH_W + JOG
        self.bs_col = self.x1_col + xg.width + JOG
        self.x2_col = self.bs_col + BRANCH_W + JOG
        self.width = self.x2_col + xg.width + 1


def build_crossing(ba: int, bb: int, D: int, registry=None, check=False, dry=False) -> Group:
    """Swap two cables: a enters on top and leaves at the bottom (port q), b the reverse (port p).

    With s = a XOR b, the top output is s XOR a = b and the bottom one is
    s XOR b = a.
    """
    ctx = Ctx(D, registry, dry)
    c = CrossingGeometry(frame_for(D))
    xg = c.xor
    s = Sheet("crossing", c.height, c.width)
    s.input("a", c.a_in, ba)
    s.input("b", c.b_in, bb)
    place_branch(s, ctx, c.a_in - 2, 0, "a", "a1", "a2")
    place_branch(s, ctx, c.b_in - 2, 0, "b", "b1", "b2")
    s.route("a1", c.x1_col, xg.u)
    s.route("b2", c.x1_col, c.t3 + xg.v)
    place_xor(s, ctx, c.t1, c.x1_col, "a2", "b1", "s")
    place_branch(s, ctx, xg.v - 1, c.bs_col, "s", "s1", "s2")  # s1 lands on the top XOR's v row
    s.route("a1", c.x2_col)
    s.route("b2", c.x2_col)
    place_xor(s, ctx, 0, c.x2_col, "a1", "s1", "p")
    place_xor(s, ctx, c.t3, c.x2_col, "s2", "b2", "q")
    g = s.finish({"p": "p", "q": "q"})
    g.meta["bounds"] = {"a": ba, "b": bb}
    if check:
        check_clearance(g, opaque=True)
    return g


def place_xor(sheet: Sheet, ctx: Ctx, top, left, u, v, z):
    xg = XorGeometry(frame_for(ctx.D))
    proto = _cable_proto("xor", (xg.height, xg.width), {"u": (xg.u, 0), "v": (xg.v, 0)},
                         {"z": (xg.z, xg.width - 1)})
    b = sheet.connect(proto, top, left, {"u": u, "v": v})
    g = build_xor(b["u"], b["v"], ctx.D, ctx.registry, dry=ctx.dry)
    if ctx.dry:
        g = Lazy(build_xor, (b["u"], b["v"], ctx.D, ctx.registry, False, True), g)
    sheet.place(g, top, left, {"u": u, "v": v}, {"z": z}, route=False)
    _need(sheet, g)
    return g


def place_crossing(sheet: Sheet, ctx: Ctx, top, left, a, b, p, q):
    """Cross cables ``a`` (upper) and ``b``; ``p`` continues b above ``q`` continuing a."""
    c = CrossingGeometry(frame_for(ctx.D))
    proto = _cable_proto("crossing", (c.height, c.width), {"a": (c.a_in, 0), "b": (c.b_in, 0)},
                         {"p": (c.p_out, c.width - 1), "q": (c.q_out, c.width - 1)})
    bd = sheet.connect(proto, top, left, {"a": a, "b": b})
    g = build_crossing(bd["a"], bd["b"], ctx.D, ctx.registry, dry=ctx.dry)
    if ctx.dry:
        g = Lazy(build_crossing, (bd["a"], bd["b"], ctx.D, ctx.registry, False, True), g)
    sheet.place(g, top, left, {"a": a, "b": b}, {"p": p, "q": q}, route=False)
    _need(sheet, g)
    return g
