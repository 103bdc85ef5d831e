"""Boolean circuits as sorted lists of gate records."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from pathlib import Path


class CircuitError(ValueError):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


class UnsortedGates(CircuitError):
    pass


class ForwardReference(CircuitError):
    pass


class BadInputGate(CircuitError):
    pass


class MultipleOutputs(CircuitError):
    pass


class GateType(enum.Enum):
    INPUT = "INPUT"
    NAND = "NAND"
    NOT = "NOT"
    AND = "AND"
    OR = "OR"
    OUTPUT = "OUTPUT"


ARITY = {GateType.NOT: 1, GateType.NAND: 2, GateType.AND: 2, GateType.OR: 2}


@dataclass(frozen=True)
class GateRecord:
    """Gate ``g`` of type ``t`` reading gates ``g1`` and ``g2`` (``g2 = g1`` for one input)."""

    g: int
    t: GateType
    g1: int = 0
    g2: int = 0

    def __str__(self):
        return f"{self.g} {self.t.value} {self.g1} {self.g2}"


@dataclass(frozen=True)
class CircuitDescription:
    gates: tuple
    output_gate: int

    @property
    def n(self):
        return sum(1 for x in self.gates if x.t is GateType.INPUT)

    @property
    def m(self):
        return len(self.gates) - self.n

    def __getitem__(self, g) -> GateRecord:
        return self.gates[g - 1]

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def logic(self):
        return self.gates[self.n:]

    def to_text(self) -> str:
        lines = []
        for x in self.gates:
            lines.append(str(x))
        last = self.gates[-1].g
        if self.output_gate != last:
            lines.append(f"{self.output_gate} OUTPUT {self.output_gate} {self.output_gate}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CvpInstance:
    circuit: CircuitDescription
    input_bits: tuple

    def __post_init__(self):
        if len(self.input_bits) != self.circuit.n:
            raise ValueError(f"{len(self.input_bits)} input bits for {self.circuit.n} inputs")
        if any(b not in (0, 1) for b in self.input_bits):
            raise ValueError("input bits must be 0 or 1")

    def to_text(self) -> str:
        return self.circuit.to_text() + "inputs " + "".join(map(str, self.input_bits)) + "\n"


def _int(tok, line):
    try:
        return int(tok, 0) if tok.startswith("0b") else int(tok)
    except ValueError:
        raise CircuitError(f"bad number {tok!r}", line) from None


def _records(text):
    """Yield (lineno, fields) for gate lines and (lineno, bits) for the inputs line."""
    for i, raw in enumerate(text.splitlines(), 1):
        ln = raw.split("#", 1)[0].strip()
        if ln:
            yield i, ln.split()


def parse(text: str) -> CircuitDescription:
    """Validate and build a circuit from ``<g> <TYPE> <g1> <g2>`` lines.

    A trailing ``<g> OUTPUT <g> <g>`` line (or the OUTPUT type on a gate
    line) designates the output; by default it is the highest gate.
    """
    return _parse(text)[0]


def parse_instance(text: str) -> CvpInstance:
    cd, bits = _parse(text)
    if bits is None:
        raise CircuitError("missing 'inputs <bits>' line")
    return CvpInstance(cd, bits)


def _parse(text):
    gates, output, bits = [], None, None
    for line, f in _records(text):
        if f[0] == "inputs":
            if len(f) != 2 or set(f[1]) - {"0", "1"}:
                raise CircuitError("inputs line needs one bit string", line)
            bits = tuple(int(ch) for ch in f[1])
            continue
        if len(f) != 4:
            raise CircuitError(f"expected '<g> <TYPE> <g1> <g2>', got {len(f)} fields", line)
        g, g1, g2 = _int(f[0], line), _int(f[2], line), _int(f[3], line)
        try:
            t = GateType(f[1].upper())
        except ValueError:
            raise CircuitError(f"unknown gate type {f[1]!r}", line) from None
        if t is GateType.OUTPUT:
            if output is not None:
                raise MultipleOutputs("more than one OUTPUT designation", line)
            output = g
            if gates and g == gates[-1].g:
                continue  # flag on an existing gate
            if g <= len(gates):
                continue
            raise ForwardReference(f"OUTPUT names unknown gate {g}", line)
        if g != len(gates) + 1:
            raise UnsortedGates(f"gate {g} where {len(gates) + 1} was expected", line)
        if t is GateType.INPUT:
            if g1 or g2:
                raise BadInputGate(f"input gate {g} must have sources 0 0", line)
            if gates and gates[-1].t is not GateType.INPUT:
                raise UnsortedGates(f"input gate {g} after a logic gate", line)
        else:
            if not (1 <= g1 < g and 1 <= g2 < g):
                raise ForwardReference(f"gate {g} reads {g1}, {g2}", line)
            if ARITY[t] == 1 and g2 != g1:
                raise CircuitError(f"one-input gate {g} needs g2 = g1", line)
        gates.append(GateRecord(g, t, g1, g2))
    if not gates:
        raise CircuitError("empty circuit")
    return CircuitDescription(tuple(gates), output or gates[-1].g), bits


def load(path) -> CircuitDescription:
    return parse(Path(path).read_text())


def load_instance(path) -> CvpInstance:
    return parse_instance(Path(path).read_text())


def _apply(t, a, b):
    if t is GateType.NAND:
        return 1 - (a & b)
    if t is GateType.AND:
        return a & b
    if t is GateType.OR:
        return a | b
    if t is GateType.NOT:
        return 1 - a
    raise ValueError(t)


def evaluate(inst: CvpInstance):
    """All gate values (index g-1) in one ascending pass, and the output bit."""
    cd = inst.circuit
    vals = list(inst.input_bits)
    for x in cd.logic():
        vals.append(_apply(x.t, vals[x.g1 - 1], vals[x.g2 - 1]))
    return tuple(vals), vals[cd.output_gate - 1]


def to_nand(cd: CircuitDescription) -> CircuitDescription:
    """Rewrite NOT/AND/OR into NAND gates, renumbering in order."""
    n = cd.n
    gates = list(cd.gates[:n])
    new = {i: i for i in range(1, n + 1)}

    def emit(a, b):
        g = len(gates) + 1
        gates.append(GateRecord(g, GateType.NAND, a, b))
        return g

    for x in cd.logic():
        a, b = new[x.g1], new[x.g2]
        if x.t is GateType.NAND:
            new[x.g] = emit(a, b)
        elif x.t is GateType.NOT:
            new[x.g] = emit(a, a)
        elif x.t is GateType.AND:
            c = emit(a, b)
            new[x.g] = emit(c, c)
        elif x.t is GateType.OR:
            new[x.g] = emit(emit(a, a), emit(b, b))
    return CircuitDescription(tuple(gates), new[cd.output_gate])


def random_circuit(n: int, m: int, seed: int) -> CircuitDescription:
    """NAND circuit whose gates read uniformly random earlier gates."""
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    rng = random.Random(seed)
    gates = [GateRecord(i, GateType.INPUT) for i in range(1, n + 1)]
    for g in range(n + 1, n + m + 1):
        gates.append(GateRecord(g, GateType.NAND, rng.randint(1, g - 1), rng.randint(1, g - 1)))
    return CircuitDescription(tuple(gates), n + m)


def cone(cd: CircuitDescription) -> set:
    """Gates the output depends on, the output included."""
    need = {cd.output_gate}
    for x in reversed(cd.gates):
        if x.g in need and x.t is not GateType.INPUT:
            need |= {x.g1, x.g2}
    return need
