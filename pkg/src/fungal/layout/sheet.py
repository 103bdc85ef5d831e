"""Cable routing on a sheet.

A cable is a pair of wires, the positive one two blocks above the negative
one.  The Sheet keeps a cursor per cable: the next free block of its
positive wire and an upper bound on the cycle at which the signal reaches
that block.  Elements are placed by routing their input cables onto the
element's port rows, then continuing from its output ports.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..components import MINUS, PLUS, Port, Role, Side
from .geometry import Group, Source, Wire

JOG = 6  # columns a cable needs to change rows


class RoutingError(ValueError):
    pass


@dataclass
class Cursor:
    row: int
    col: int
    bound: int  # arrival bound (cycles) at block (row, col)


def cable_wires(r, c, r2, c2):
    """Two wires carrying a cable from column c through column c2 - 1.

    The positive wire starts at (r, c) and ends at (r2, c2 - 1).  When the
    rows differ, the wire on the inside of the bend turns first so that the
    pair keeps its two-block spacing.
    """
    n = c2 - c - 1
    if n < 0:
        raise RoutingError("cable must advance")
    d = r2 - r
    if d == 0:
        moves = [("R", n)] if n else []
        return Wire((r, c), moves), Wire((r + 2, c), list(moves)), n
    if n < JOG - 1:
        raise RoutingError(f"a jog needs {JOG} columns, got {n + 1}")
    v = ("D", d) if d > 0 else ("U", -d)
    first, second = (1, 3) if d > 0 else (3, 1)  # (minus, plus) turn offsets
    plus = Wire((r, c), [("R", second), v, ("R", n - second)])
    minus = Wire((r + 2, c), [("R", first), v, ("R", n - first)])
    return plus, minus, n + abs(d)


class Sheet:
    """A rectangular composite under construction."""

    def __init__(self, name, height=None, width=None):
        self.group = Group(name=name)
        self.cur: dict[str, Cursor] = {}
        self.height, self.width = height, width
        self.inputs = {}
        self.elements = []  # (name, group, top, left)
        self.pieces = []  # [plus, minus] wire pairs, painted before everything else
        self.tail = {}  # cable -> index of its last piece, while that piece is straight

    # -- cables ------------------------------------------------------------

    def input(self, name, row, bound=0, col=0):
        """A cable entering through the left edge at ``row``."""
        self.cur[name] = Cursor(row, col, bound)
        self.inputs[name] = row
        if col == 0:
            self.group.ports[name + "p"] = Port(name + "p", Role.INPUT, PLUS, Side.LEFT, row, 0)
            self.group.ports[name + "m"] = Port(name + "m", Role.INPUT, MINUS, Side.LEFT, row + 2, 0)

    def source(self, name, row, bit, col=0):
        """A cable starting with an input signal at time zero."""
        self.cur[name] = Cursor(row, col, 0)
        self.group.add(Source(row if bit else row + 2, col, PLUS if bit else MINUS))

    def route(self, name, col, row=None):
        """Extend a cable to column ``col`` (exclusive), ending on ``row``."""
        cur = self.cur[name]
        row = cur.row if row is None else row
        if col < cur.col:
            raise RoutingError(f"cable {name} is already past column {col}")
        if col == cur.col:
            if row != cur.row:
                raise RoutingError(f"cable {name} cannot jog in zero columns")
            return cur
        plus, minus, length = cable_wires(cur.row, cur.col, row, col)
        i = self.tail.get(name)
        if row == cur.row and i is not None:
            # extend the previous straight piece instead of starting a new one
            c0 = self.pieces[i][0].start[1]
            self.pieces[i] = list(cable_wires(row, c0, row, col)[:2])
        else:
            self.pieces.append([plus, minus])
            i = len(self.pieces) - 1
        if row == cur.row:
            self.tail[name] = i
        else:
            self.tail.pop(name, None)
        self.cur[name] = Cursor(row, col, cur.bound + length + 1)
        return self.cur[name]

    def end(self, name):
        self.tail.pop(name, None)
        return self.cur.pop(name)

    def rename(self, old, new):
        self.cur[new] = self.cur.pop(old)
        if old in self.tail:
            self.tail[new] = self.tail.pop(old)

    def pass_all(self, col, skip=()):
        for name in list(self.cur):
            if name not in skip:
                self.route(name, col)

    # -- elements ----------------------------------------------------------

    def place(self, elem: Group, top: int, left: int, ins: dict, outs: dict, route=True):
        """Stamp ``elem`` and connect it.

        ``ins`` maps the element's cable port prefixes to sheet cables, which
        are routed onto the port rows first.  ``outs`` maps output prefixes
        to new cable names.  The element's ``meta['bounds']`` lists the input
        arrival bounds it was built for; routing must meet them.
        """
        built_for = elem.meta.get("bounds", {})
        for prefix, cable in ins.items():
            p = elem.ports[prefix + "p"]
            if route:
                self.route(cable, left + p.bcol, top + p.brow)
            cur = self.cur.pop(cable)
            self.tail.pop(cable, None)
            if (cur.row, cur.col) != (top + p.brow, left + p.bcol):
                raise RoutingError(f"cable {cable} misses port {prefix} of {elem.name}")
            if prefix in built_for and cur.bound > built_for[prefix]:
                raise RoutingError(
                    f"{elem.name}: input {prefix} may arrive at {cur.bound}, built for {built_for[prefix]}")
        self.group.add(elem, top, left)
        self.elements.append((elem.name, elem, top, left))
        for prefix, cable in outs.items():
            p = elem.ports[prefix + "p"]
            self.cur[cable] = Cursor(top + p.brow, left + p.bcol + 1, elem.meta["out"][prefix])

    def connect(self, proto: Group, top: int, left: int, ins: dict) -> dict:
        """Route ``ins`` onto the ports of ``proto`` placed at (top, left).

        Returns the arrival bound per input prefix, for building the real
        element before placing it with ``route=False``.
        """
        out = {}
        for prefix, cable in ins.items():
            p = proto.ports[prefix + "p"]
            out[prefix] = self.route(cable, left + p.bcol, top + p.brow).bound
        return out

    def bound(self, name):
        return self.cur[name].bound

    def finish(self, outputs, width=None, height=None):
        """Route ``outputs`` (prefix -> cable) to the right edge and fix the size."""
        width = width or self.width
        for prefix, cable in outputs.items():
            cur = self.route(cable, width)
            self.group.ports[prefix + "p"] = Port(prefix + "p", Role.OUTPUT, PLUS, Side.RIGHT, cur.row, width - 1)
            self.group.ports[prefix + "m"] = Port(prefix + "m", Role.OUTPUT, MINUS, Side.RIGHT, cur.row + 2,
                                                   width - 1)
        self.group.meta["out"] = {p: self.cur[c].bound for p, c in outputs.items()}
        self.group.size = (height or self.height, width)
        # a source block must paint over the wire it sits on
        wires = [(w, 0, 0) for pair in self.pieces for w in pair]
        self.group.items[:0] = wires
        self.pieces, self.tail = [], {}
        return self.group
