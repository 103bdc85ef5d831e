"""Component templates: cell rectangles with typed, block-aligned ports."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..engine import parse_grid, row_text


class Polarity(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def other(self) -> "Polarity":
        return MINUS if self is PLUS else PLUS

    @property
    def bit(self) -> int:
        return 1 if self is PLUS else 0

    @classmethod
    def parse(cls, s):
        if isinstance(s, Polarity) or s is None:
            return s
        if s in ("*", "any"):
            return None
        return {"+": PLUS, "-": MINUS, "PLUS": PLUS, "MINUS": MINUS}[s]

    def __str__(self):
        return self.value


PLUS, MINUS = Polarity.PLUS, Polarity.MINUS

SIGNAL = {
    PLUS: np.array([[4, 3], [3, 3]], np.uint8),
    MINUS: np.array([[3, 3], [4, 3]], np.uint8),
}
WIRE_BLOCK = np.full((2, 2), 3, np.uint8)


class Role(enum.Enum):
    INPUT = "INPUT"
    OUTPUT = "OUTPUT"
    SOURCE = "SOURCE"
    GATE = "GATE"
    DRAIN = "DRAIN"

    @property
    def incoming(self) -> bool:
        return self in (Role.INPUT, Role.SOURCE, Role.GATE)


class Side(enum.Enum):
    LEFT = "L"
    RIGHT = "R"
    TOP = "T"
    BOTTOM = "B"


class PolarityMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Port:
    """A block on the template boundary through which signals pass.

    ``polarity`` None means the port carries either polarity (plain wire).
    """

    name: str
    role: Role
    polarity: Polarity | None
    side: Side
    brow: int
    bcol: int

    @property
    def cell(self):
        return 2 * self.brow, 2 * self.bcol

    def sentinel(self, pol: Polarity | None = None, origin=(0, 0)):
        """The cell just beyond the port block that a leaving signal hits first.

        A positive signal leaves a right-hand port through the block's lower
        cell, a negative one through the upper cell.
        """
        pol = pol or self.polarity or PLUS
        r, c = origin[0] + 2 * self.brow, origin[1] + 2 * self.bcol
        lower = pol is PLUS
        if self.side is Side.RIGHT:
            return (r + 1, c + 2) if lower else (r, c + 2)
        if self.side is Side.LEFT:
            return (r + 1, c - 1) if lower else (r, c - 1)
        if self.side is Side.TOP:
            return (r - 1, c) if lower else (r - 1, c + 1)
        return (r + 2, c) if lower else (r + 2, c + 1)

    def sentinels(self, origin=(0, 0)):
        return {p: self.sentinel(p, origin) for p in (PLUS, MINUS)}

    def shifted(self, dbr, dbc, name=None):
        return replace(self, brow=self.brow + dbr, bcol=self.bcol + dbc, name=name or self.name)

    def to_line(self):
        pol = self.polarity.value if self.polarity else "*"
        return f"{self.name} {self.role.value} {pol} {self.side.value} {self.brow} {self.bcol}"


@dataclass
class ComponentTemplate:
    """A rectangle of initial cell states plus ports and delay metadata.

    ``width`` is the wire distance between inputs and outputs used by the
    delay calculus; ``delay`` is the certified minimum latency in cycles
    (retarders only).
    """

    name: str
    cells: np.ndarray
    ports: dict = field(default_factory=dict)
    width: int | None = None
    delay: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.cells = np.asarray(self.cells, np.uint8)
        h, w = self.cells.shape
        if h % 2 or w % 2:
            raise ValueError(f"{self.name}: template dimensions must be even, got {h}x{w}")
        if self.cells.max(initial=0) > 7:
            raise ValueError(f"{self.name}: cell states must lie in 0..7")
        for p in self.ports.values():
            if not (0 <= p.brow < h // 2 and 0 <= p.bcol < w // 2):
                raise ValueError(f"{self.name}: port {p.name} outside the rectangle")
            on_edge = {
                Side.LEFT: p.bcol == 0, Side.RIGHT: p.bcol == w // 2 - 1,
                Side.TOP: p.brow == 0, Side.BOTTOM: p.brow == h // 2 - 1,
            }[p.side]
            if not on_edge:
                raise ValueError(f"{self.name}: port {p.name} not on its {p.side.name} edge")

    @property
    def shape(self):
        return self.cells.shape

    @property
    def blocks(self):
        return self.cells.shape[0] // 2, self.cells.shape[1] // 2

    def port(self, name) -> Port:
        try:
            return self.ports[name]
        except KeyError:
            raise KeyError(f"{self.name} has no port {name!r}") from None

    def inputs(self):
        return [p for p in self.ports.values() if p.role.incoming]

    def outputs(self):
        return [p for p in self.ports.values() if not p.role.incoming]

    def flipped(self, name=None) -> "ComponentTemplate":
        """Mirror top-to-bottom; a positive signal mirrors into a negative one."""
        hb = self.blocks[0]
        side = {Side.TOP: Side.BOTTOM, Side.BOTTOM: Side.TOP}
        ports = {
            k: replace(p, brow=hb - 1 - p.brow, side=side.get(p.side, p.side),
                       polarity=p.polarity.other if p.polarity else None)
            for k, p in self.ports.items()
        }
        return ComponentTemplate(name or self.name, self.cells[::-1].copy(), ports,
                                 self.width, self.delay, dict(self.meta))

    # -- file format --------------------------------------------------------

    def to_text(self) -> str:
        h, w = self.cells.shape
        out = [f"# {self.name}", f"rect 0 0 {h} {w}"]
        out += [row_text(r) for r in self.cells]
        out.append("ports:")
        out += [p.to_line() for p in self.ports.values()]
        if self.width is not None:
            out.append(f"width: {self.width}")
        if self.delay is not None:
            out.append(f"delay: {self.delay}")
        for k, v in self.meta.items():
            out.append(f"meta: {k} {v}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str) -> "ComponentTemplate":
        _, cells, rest = parse_grid(text.splitlines())
        ports, width, delay, meta = {}, None, None, {}
        mode = None
        for ln in rest:
            ln = ln.strip()
            if ln == "ports:":
                mode = "ports"
            elif ln.startswith("width:"):
                width = int(ln.split(":", 1)[1])
            elif ln.startswith("delay:"):
                delay = int(ln.split(":", 1)[1])
            elif ln.startswith("meta:"):
                k, v = ln.split(":", 1)[1].split(None, 1)
                meta[k] = v
            elif mode == "ports":
                pname, role, pol, side, br, bc = ln.split()
                ports[pname] = Port(pname, Role(role), Polarity.parse(pol), Side(side),
                                    int(br), int(bc))
            else:
                raise ValueError(f"{name}: unexpected line {ln!r}")
        return cls(name, cells, ports, width, delay, meta)

    @classmethod
    def load(cls, path) -> "ComponentTemplate":
        path = Path(path)
        return cls.from_text(path.read_text(), path.stem)

    def save(self, path):
        Path(path).write_text(self.to_text())
