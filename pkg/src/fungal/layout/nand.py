"""The NAND macro.

Four switches stacked in one column do the work::

    S1 (+)  source R1, gate x-            -> M -> z+
    S4 (-)  source via hook, gate x+      -> X2 -> z-
    S3 (+)  source R3, gate y-            -> Xh -> X2 -> M -> z+
    S2 (-)  source R2, gate y+            -> Xh -> hook -> S4

Semicrossings X1 and Xy turn each input cable over so that its two gates
are adjacent.  R1 hangs above the column, R2 below it and R3 sits between
the x and y cables.  Xh and X2 are safe to share: S2 and S3 never both
fire, and neither do S4 and S3.  Only the retarder box (set by the delay
cap D) stretches the geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..components import MINUS, PLUS, Port, Role, Side, box_for, default_registry
from ..components.retarder import snake_choice
from .geometry import Group, Snake, Source, Stamp, Wire, check_clearance
from .timing import HOP, Span, path


class BudgetExceeded(ValueError):
    """A retarder would need more delay than the cap D allows."""


# cycles by which every gate signal must beat its source
MARGIN = 2
MIN_CAP = 13  # smallest cap with a snake retarder box


@dataclass(frozen=True)
class NandFrame:
    """Block coordinates of a NAND macro for one retarder box."""

    hb: int
    wb: int

    cr = 2  # retarder box column

    @property
    def a(self):
        return self.hb + 2  # top row of S1

    @property
    def b(self):
        return self.a + self.hb + 7  # top row of S3

    @property
    def cs(self):
        return self.cr + self.wb + 5  # switch column

    @property
    def height(self):
        return self.b + self.hb + 7

    @property
    def width(self):
        return self.cs + 29

    @property
    def rows(self):
        """Rows of the input ports x+, x-, y+, y- and output ports z+, z-."""
        a, b = self.a, self.b
        return {"xp": a + 2, "xm": a + 4, "yp": b + 2, "ym": b + 4, "zp": a + 2, "zm": a + 4}

    @property
    def ret_rows(self):
        return {"R1": 1, "R3": self.a + 8, "R2": self.b + 6}


def frame_for(D: int) -> NandFrame:
    return NandFrame(*box_for(max(D, MIN_CAP)))


@lru_cache(maxsize=None)
def wires(f: NandFrame) -> dict:
    a, b, cs, hb = f.a, f.b, f.cs, f.hb
    R, L, U, Dn = "R", "L", "U", "D"
    spec = {
        "xp": ((a + 2, 0), [(R, cs - 6)]),
        "xm": ((a + 4, 0), [(R, cs - 6)]),
        "yp": ((b + 2, 0), [(R, cs - 6)]),
        "ym": ((b + 4, 0), [(R, cs - 6)]),
        "x1_s1": ((a + 2, cs - 2), [(R, 1)]),
        "x1_s4": ((a + 4, cs - 2), [(R, 1)]),
        "xy_s3": ((b + 2, cs - 2), [(R, 1)]),
        "xy_s2": ((b + 4, cs - 2), [(R, 1)]),
        "r1": ((1, cs - 5), [(R, 3), (Dn, a - 1), (R, 1)]),
        "r3": ((a + 8, cs - 5), [(R, 1), (Dn, hb - 1), (R, 3)]),
        "r2": ((b + 6, cs - 5), [(R, 4)]),
        "s2_xh": ((b + 5, cs + 4), [(R, 1), (U, 2), (R, 2)]),
        "s3_xh": ((b + 1, cs + 4), [(R, 3)]),
        "hook": ((b + 1, cs + 11), [(R, 1), (U, b - a - 8), (L, 14), (U, 3), (R, 1)]),
        "xh_x2": ((b + 3, cs + 11), [(R, 3), (U, b - a - 4), (R, 1)]),
        "s4_x2": ((a + 5, cs + 4), [(R, 11)]),
        "s1_m": ((a + 1, cs + 4), [(R, 17)]),
        "x2_m": ((a + 5, cs + 19), [(R, 1), (U, 2), (R, 1)]),
        "zp": ((a + 2, cs + 26), [(R, 2)]),
        "zm": ((a + 7, cs + 19), [(R, 8), (U, 3), (R, 1)]),
    }
    return {k: Wire(s, m) for k, (s, m) in spec.items()}


def gate_spans(f: NandFrame) -> dict:
    """Cycles from a macro input port block to each switch gate port block."""
    w = wires(f)
    return {
        "S1": path(w["xm"], HOP, ("semicross_plus", "m_in", "m_out"), w["x1_s1"], HOP),
        "S4": path(w["xp"], HOP, ("semicross_plus", "p_in", "p_out"), w["x1_s4"], HOP),
        "S3": path(w["ym"], HOP, ("semicross_plus", "m_in", "m_out"), w["xy_s3"], HOP),
        "S2": path(w["yp"], HOP, ("semicross_plus", "p_in", "p_out"), w["xy_s2"], HOP),
    }


def source_spans(f: NandFrame) -> dict:
    """Cycles from a retarder's output to its switch source port block.

    For S4 the span starts at S2's source port.
    """
    w = wires(f)
    return {
        "S1": path(w["r1"], HOP),
        "S2": path(w["r2"], HOP),
        "S3": path(w["r3"], HOP),
        "S4": path(("switch_minus", "source", "drain"), w["s2_xh"], HOP,
                   ("semicross_plus", "m_in", "m_out"), w["hook"], HOP),
    }


def nand_delays(f: NandFrame, bound_x: int, bound_y: int) -> dict:
    """Smallest retarder delays that let every gate signal beat its source.

    ``bound_x``/``bound_y`` bound the cycle at which the input signals reach
    the macro's input ports.  Each source must arrive at least MARGIN
    cycles after the latest possible gate signal.
    """
    g, s = gate_spans(f), source_spans(f)
    need = {
        "R1": bound_x + g["S1"].hi - s["S1"].lo,
        "R2": max(bound_y + g["S2"].hi - s["S2"].lo,
                  bound_x + g["S4"].hi - s["S4"].lo - s["S2"].lo),
        "R3": bound_y + g["S3"].hi - s["S3"].lo,
    }
    return {k: max(v, 0) + MARGIN for k, v in need.items()}


def output_span(f: NandFrame, lat: dict) -> Span:
    """Cycles from time zero to the arrival of the output at its port block.

    ``lat`` maps R1..R3 to the exact retarder latencies.
    """
    w, s = wires(f), source_spans(f)
    sw = ("switch_plus", "source", "drain")
    via_s1 = path(lat["R1"], s["S1"], sw, w["s1_m"], HOP, ("merge_plus", "x", "z"), w["zp"])
    via_s3 = path(lat["R3"], s["S3"], sw, w["s3_xh"], HOP, ("semicross_plus", "p_in", "p_out"),
                  w["xh_x2"], HOP, ("semicross_minus", "p_in", "p_out"), w["x2_m"], HOP,
                  ("merge_plus", "y", "z"), w["zp"])
    via_s4 = path(lat["R2"], s["S2"], s["S4"], ("switch_minus", "source", "drain"), w["s4_x2"], HOP,
                  ("semicross_minus", "m_in", "m_out"), w["zm"])
    return Span(min(x.lo for x in (via_s1, via_s3, via_s4)), max(x.hi for x in (via_s1, via_s3, via_s4)))


def build_nand(delay_lo: int, delay_hi: int | None = None, *, D: int | None = None,
               registry=None, check: bool = True, dry: bool = False) -> Group:
    """The NAND macro for inputs x, y arriving no later than ``delay_lo``, ``delay_hi``.

    With ``delay_hi`` omitted both inputs share the bound.  The outer size
    depends only on the cap D (default: just large enough).  A dry build
    has ports and timing but no parts, never raises BudgetExceeded and
    reports the largest delay it wanted in ``meta['need']``.
    """
    reg = registry or default_registry()
    bx = delay_lo
    by = delay_lo if delay_hi is None else delay_hi
    if D is None:
        D = MIN_CAP
        while max(nand_delays(frame_for(D), bx, by).values()) > D:
            D = max(nand_delays(frame_for(D), bx, by).values())
    cap = max(D, MIN_CAP)
    f = frame_for(cap)
    delays = nand_delays(f, bx, by)
    if dry:
        g = Group(name="nand", size=(f.height, f.width))
        _ports(g, f)
    else:
        for k, v in delays.items():
            if v > cap:
                raise BudgetExceeded(f"retarder {k} needs {v} cycles but the cap is D={cap}")
        g = _assemble(f, delays, cap, reg, check)
    out = output_span(f, {k: snake_latency(v, cap) for k, v in delays.items()})
    g.meta.update(bounds={"x": bx, "y": by}, need=max(delays.values()), out={"z": out.hi + 1})
    return g


def _ports(g: Group, f: NandFrame):
    rows, e = f.rows, f.width - 1
    for name, pol in (("xp", PLUS), ("xm", MINUS), ("yp", PLUS), ("ym", MINUS)):
        g.ports[name] = Port(name, Role.INPUT, pol, Side.LEFT, rows[name], 0)
    for name, pol in (("zp", PLUS), ("zm", MINUS)):
        g.ports[name] = Port(name, Role.OUTPUT, pol, Side.RIGHT, rows[name], e)


@lru_cache(maxsize=65536)
def snake_latency(delay, cap):
    """Exact latency of the retarder drawn for ``delay``; past the cap, a guess for dry builds."""
    if delay > cap:
        return delay + 1
    return snake_choice(*box_for(cap), delay)[2]


def _retarder(top, left, delay, cap):
    """The delay line as a Snake part: same blocks as the registry retarder, drawn on demand."""
    hb, wb = box_for(cap)
    k, d, lat = snake_choice(hb, wb, delay)
    return Snake(top, left, hb, wb, k, d), lat


def _assemble(f: NandFrame, delays: dict, cap: int, reg, check: bool) -> Group:
    g = Group(name="nand", size=(f.height, f.width))
    a, b, cs = f.a, f.b, f.cs
    assert box_for(cap) == (f.hb, f.wb), "retarder box does not match the frame"
    lat = {}
    for key, pol in (("R1", PLUS), ("R2", MINUS), ("R3", PLUS)):
        top = f.ret_rows[key]
        w, lat[key] = _retarder(top, f.cr, delays[key], cap)
        g.add(w)
        g.add(Source(top, f.cr, pol))

    g.add(Stamp(reg.get("semicross_plus"), a + 2, cs - 5))   # X1
    g.add(Stamp(reg.get("semicross_plus"), b + 2, cs - 5))   # Xy
    g.add(Stamp(reg.get("switch_plus"), a, cs))              # S1
    g.add(Stamp(reg.get("switch_minus"), a + 4, cs))         # S4
    g.add(Stamp(reg.get("switch_plus"), b, cs))              # S3
    g.add(Stamp(reg.get("switch_minus"), b + 4, cs))         # S2
    g.add(Stamp(reg.get("semicross_plus"), b + 1, cs + 8))   # Xh
    g.add(Stamp(reg.get("semicross_minus"), a + 5, cs + 16))  # X2
    g.add(Stamp(reg.get("merge_plus"), a + 1, cs + 22))      # M
    for w in wires(f).values():
        g.add(w)

    _ports(g, f)
    out = output_span(f, lat)
    g.meta.update(D=cap, r1=lat["R1"], r2=lat["R2"], r3=lat["R3"], out_lo=out.lo, out_hi=out.hi)
    if check:
        check_clearance(g)
    return g
