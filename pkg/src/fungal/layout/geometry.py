"""Hierarchical layouts of stamps, wires and sources on the block grid.

Positions are in blocks (2x2 cells).  A Group holds parts at block offsets
and can paint itself into a Configuration, render any cell window without
touching the rest, and check that distinct nets keep one empty block
between them except where a wire ends on a port.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..components.retarder import iter_snake_moves
from ..components.template import SIGNAL, ComponentTemplate, Polarity, Port

STEP = {"R": (0, 1), "L": (0, -1), "U": (-1, 0), "D": (1, 0)}


@dataclass(frozen=True)
class Box:
    """Block rectangle: top row, left column, rows, cols."""

    r: int
    c: int
    h: int
    w: int

    @property
    def r1(self):
        return self.r + self.h

    @property
    def c1(self):
        return self.c + self.w

    def shift(self, dr, dc):
        return Box(self.r + dr, self.c + dc, self.h, self.w)

    def union(self, o):
        r, c = min(self.r, o.r), min(self.c, o.c)
        return Box(r, c, max(self.r1, o.r1) - r, max(self.c1, o.c1) - c)

    def hits(self, r, c, h, w):
        return self.r < r + h and r < self.r1 and self.c < c + w and c < self.c1


class Part:
    box: Box

    def paint(self, out, r0, c0, dr, dc):
        """Paint into ``out`` (cells) whose top-left cell is (r0, c0); part shifted by blocks."""
        raise NotImplementedError

    def blocks(self):
        """Occupied blocks (relative to the part's frame)."""
        raise NotImplementedError


def _clip(out, r0, c0, cr, cc, h, w):
    """Intersection of a cell rectangle with the output window, as slices."""
    H, W = out.shape
    a, b = max(cr, r0), min(cr + h, r0 + H)
    x, y = max(cc, c0), min(cc + w, c0 + W)
    if a >= b or x >= y:
        return None
    return (slice(a - r0, b - r0), slice(x - c0, y - c0)), (slice(a - cr, b - cr), slice(x - cc, y - cc))


@dataclass
class Stamp(Part):
    template: ComponentTemplate
    br: int
    bc: int

    def __post_init__(self):
        hb, wb = self.template.blocks
        self.box = Box(self.br, self.bc, hb, wb)

    def paint(self, out, r0, c0, dr, dc):
        h, w = self.template.shape
        cl = _clip(out, r0, c0, 2 * (self.br + dr), 2 * (self.bc + dc), h, w)
        if cl:
            dst, src = cl
            sub = self.template.cells[src]
            view = out[dst]
            np.copyto(view, sub, where=sub != 0)

    def blocks(self):
        hb, wb = self.template.blocks
        occ = self.template.cells.reshape(hb, 2, wb, 2).any(axis=(1, 3))
        return [(self.br + r, self.bc + c) for r, c in zip(*np.nonzero(occ))]

    def port(self, name) -> Port:
        return self.template.port(name).shifted(self.br, self.bc)


@dataclass
class Wire(Part):
    """A wire from block ``start`` following run-length ``moves``."""

    start: tuple
    moves: list

    def __post_init__(self):
        self.segments = []  # (r, c, h, w) in blocks
        r, c = self.start
        pts = [(r, c)]
        for d, n in self.moves:
            if n <= 0:
                raise ValueError(f"empty move {d}{n}")
            dr, dc = STEP[d]
            nr, nc = r + dr * n, c + dc * n
            self.segments.append((min(r, nr), min(c, nc), abs(nr - r) + 1, abs(nc - c) + 1))
            r, c = nr, nc
            pts.append((r, c))
        if not self.moves:
            self.segments.append((r, c, 1, 1))
        self.end = (r, c)
        box = None
        for s in self.segments:
            b = Box(*s)
            box = b if box is None else box.union(b)
        self.box = box

    @property
    def length(self):
        """Wire distance from the first to the last block."""
        return sum(n for _, n in self.moves)

    @property
    def turns(self):
        return max(len(self.moves) - 1, 0)

    def paint(self, out, r0, c0, dr, dc):
        for r, c, h, w in self.segments:
            cl = _clip(out, r0, c0, 2 * (r + dr), 2 * (c + dc), 2 * h, 2 * w)
            if cl:
                out[cl[0]] = 3

    def blocks(self):
        out = []
        r, c = self.start
        out.append((r, c))
        for d, n in self.moves:
            dr, dc = STEP[d]
            for _ in range(n):
                r, c = r + dr, c + dc
                out.append((r, c))
        return out


class Snake(Wire):
    """A snake retarder drawn from its parameters.

    Moves and segments are generated on demand, so painting a window costs
    no memory that grows with the delay.
    """

    def __init__(self, top, left, hb, wb, k, d):
        self.hb, self.wb, self.k, self.d = hb, wb, k, d
        self.start = (top, left)
        self.end = (top, left + wb - 1)
        self.box = Box(top, left, hb, wb)

    @property
    def moves(self):
        return iter_snake_moves(self.hb, self.wb, self.k, self.d)

    @property
    def segments(self):
        r, c = self.start
        for d, n in self.moves:
            dr, dc = STEP[d]
            nr, nc = r + dr * n, c + dc * n
            yield min(r, nr), min(c, nc), abs(nr - r) + 1, abs(nc - c) + 1
            r, c = nr, nc

    @property
    def turns(self):
        return sum(1 for _ in self.moves) - 1

    def paint(self, out, r0, c0, dr, dc):
        H, W = out.shape
        if self.box.shift(dr, dc).hits(r0 // 2 - 1, c0 // 2 - 1, H // 2 + 3, W // 2 + 3):
            super().paint(out, r0, c0, dr, dc)


@dataclass
class Source(Part):
    """A signal block present in the initial configuration."""

    br: int
    bc: int
    polarity: Polarity

    def __post_init__(self):
        self.box = Box(self.br, self.bc, 1, 1)

    def paint(self, out, r0, c0, dr, dc):
        cl = _clip(out, r0, c0, 2 * (self.br + dr), 2 * (self.bc + dc), 2, 2)
        if cl:
            out[cl[0]] = SIGNAL[self.polarity][cl[1]]

    def blocks(self):
        return [(self.br, self.bc)]


@dataclass
class Group(Part):
    """Parts at block offsets.  Later parts paint over earlier ones."""

    name: str = "group"
    items: list = field(default_factory=list)  # (part, dr, dc)
    ports: dict = field(default_factory=dict)
    size: tuple | None = None  # declared outer size in blocks
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._box = None

    def add(self, part, dr=0, dc=0):
        self.items.append((part, dr, dc))
        self._box = None
        return part

    @property
    def box(self):
        if self.size is not None:
            return Box(0, 0, *self.size)
        if self._box is None:
            box = None
            for p, dr, dc in self.items:
                b = p.box.shift(dr, dc)
                box = b if box is None else box.union(b)
            self._box = box or Box(0, 0, 0, 0)
        return self._box

    def paint(self, out, r0, c0, dr=0, dc=0):
        H, W = out.shape
        for p, pr, pc in self.items:
            b = p.box.shift(dr + pr, dc + pc)
            if b.hits(r0 // 2 - 1, c0 // 2 - 1, H // 2 + 3, W // 2 + 3):
                p.paint(out, r0, c0, dr + pr, dc + pc)

    def render(self, r0, c0, h, w) -> np.ndarray:
        """Cells of the window with top-left cell (r0, c0), relative to this group."""
        out = np.zeros((h, w), np.uint8)
        self.paint(out, r0, c0)
        return out

    def cells(self) -> np.ndarray:
        b = self.box
        return self.render(2 * b.r, 2 * b.c, 2 * b.h, 2 * b.w)

    def leaves(self, dr=0, dc=0):
        """Yield (part, dr, dc) for every non-group part, with absolute offsets."""
        for p, pr, pc in self.items:
            if isinstance(p, (Group, Lazy)):
                yield from p.leaves(dr + pr, dc + pc)
            else:
                yield p, dr + pr, dc + pc

    def blocks(self):
        return [(r + dr, c + dc) for p, dr, dc in self.leaves() for r, c in p.blocks()]

    def paint_into(self, cfg, br=0, bc=0, tile_rows=512):
        """Paint into a Configuration, one horizontal band at a time."""
        b = self.box
        for r in range(b.r, b.r1, tile_rows):
            h = min(tile_rows, b.r1 - r)
            band = self.render(2 * r, 2 * b.c, 2 * h, 2 * b.w)
            if band.any():
                cfg.paste(band, 2 * (r + br), 2 * (b.c + bc), mode="add")
        cfg.extend_support(2 * (b.r + br), 2 * (b.c + bc), 2 * b.h, 2 * b.w)

    def to_template(self, name=None) -> ComponentTemplate:
        b = self.box
        ports = {k: p.shifted(-b.r, -b.c) for k, p in self.ports.items()}
        return ComponentTemplate(name or self.name, self.cells(), ports, meta=dict(self.meta))


class Lazy(Part):
    """A composite that is built only when painted or inspected.

    ``shell`` carries the outer size, ports and timing metadata; ``make``
    applied to ``args`` must rebuild the full Group deterministically.
    Recently built composites are cached, so memory stays bounded by the
    composites in view rather than by the whole layout.
    """

    def __init__(self, make, args, shell: Group):
        self.make, self.args = make, args
        self.name, self.ports, self.meta = shell.name, shell.ports, shell.meta
        self.box = shell.box

    def realize(self) -> Group:
        return _realize(self.make, self.args)

    def paint(self, out, r0, c0, dr=0, dc=0):
        self.realize().paint(out, r0, c0, dr, dc)

    def leaves(self, dr=0, dc=0):
        return self.realize().leaves(dr, dc)

    def blocks(self):
        return self.realize().blocks()


@lru_cache(maxsize=16)
def _realize(make, args):
    return make(*args)


def is_composite(p) -> bool:
    return isinstance(p, (Group, Lazy))


class ClearanceError(ValueError):
    pass


def check_clearance(group: Group, allow=(), opaque=False):
    """Distinct nets must not come within one block of each other.

    Each leaf part is its own net except that a Source shares the net of the
    wire it sits on.  Contact is allowed where an end block of a wire touches
    another net (a port connection) and for explicitly allowed net pairs.
    """
    if opaque:
        return _check_opaque(group)
    leaves = list(group.leaves())
    owner = {}
    ends = set()
    for i, (p, dr, dc) in enumerate(leaves):
        if isinstance(p, Source):
            continue
        for r, c in p.blocks():
            key = (r + dr, c + dc)
            if key in owner and owner[key] != i:
                raise ClearanceError(f"parts {owner[key]} and {i} overlap at block {key}")
            owner[key] = i
        if isinstance(p, Wire):
            ends.add((p.start[0] + dr, p.start[1] + dc))
            ends.add((p.end[0] + dr, p.end[1] + dc))
    allowed = {frozenset(a) for a in allow}
    for (r, c), i in owner.items():
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                j = owner.get((r + dr, c + dc))
                if j is None or j == i:
                    continue
                if (r, c) in ends or (r + dr, c + dc) in ends:
                    continue
                if frozenset((i, j)) in allowed:
                    continue
                raise ClearanceError(
                    f"{_label(leaves[i][0])} and {_label(leaves[j][0])} touch near block {(r, c)}")
    return True


def _check_opaque(group: Group):
    """Clearance with child groups taken as checked black boxes.

    Direct leaves are checked against each other as usual.  A child box
    must not overlap another box or any leaf, and only a wire end may
    touch one of its port blocks.
    """
    flat = Group(name=group.name, items=[it for it in group.items if not is_composite(it[0])])
    check_clearance(flat)
    boxes = [(p, p.box.shift(dr, dc), dr, dc) for p, dr, dc in group.items if is_composite(p)]
    for i, (p, b, _, _) in enumerate(boxes):
        for q, o, _, _ in boxes[i + 1:]:
            if b.hits(o.r, o.c, o.h, o.w):
                raise ClearanceError(f"{p.name} at {b.r},{b.c} overlaps {q.name} at {o.r},{o.c}")
    owner, ends = {}, set()
    for p, dr, dc in flat.items:
        if isinstance(p, Source):
            continue
        for r, c in p.blocks():
            owner[(r + dr, c + dc)] = p
        if isinstance(p, Wire):
            ends.add((p.start[0] + dr, p.start[1] + dc))
            ends.add((p.end[0] + dr, p.end[1] + dc))
    if not owner:
        return True
    keys = list(owner)
    rc = np.array(keys, np.int64).reshape(-1, 2)
    for p, b, dr, dc in boxes:
        inside = np.flatnonzero((rc[:, 0] >= b.r) & (rc[:, 0] < b.r1) & (rc[:, 1] >= b.c) & (rc[:, 1] < b.c1))
        if inside.size:
            r, c = keys[inside[0]]
            raise ClearanceError(f"{_label(owner[(r, c)])} runs through {p.name} at block {(r, c)}")
        for port in p.ports.values():
            pr, pc = port.brow + dr, port.bcol + dc
            for rr in (pr - 1, pr, pr + 1):
                for cc in (pc - 1, pc, pc + 1):
                    if (rr, cc) in owner and (rr, cc) not in ends:
                        raise ClearanceError(f"{_label(owner[(rr, cc)])} touches port {port.name} of {p.name}")
    return True


def _label(p):
    if isinstance(p, Stamp):
        return f"stamp {p.template.name}@{p.br},{p.bc}"
    if isinstance(p, Wire):
        return f"wire from {p.start}"
    return type(p).__name__
