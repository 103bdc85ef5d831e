"""Interval arithmetic on signal arrival times.

A Span (lo, hi) brackets the cycles a signal needs to cover a path.  Wire
blocks cost one cycle each; a turn saves at most one.  Template latencies
come from the certification reports, so every bound traces back to a
simulation.
"""

from __future__ import annotations

from typing import NamedTuple

from ..components import default_registry

HOP = None  # sentinel step: move from a wire end into the adjacent port block


class Span(NamedTuple):
    lo: int
    hi: int

    def __add__(self, o):
        return Span(self.lo + o[0], self.hi + o[1])


ZERO = Span(0, 0)


def wire_span(w) -> Span:
    return Span(w.length - w.turns, w.length)


def template_span(name, src, dst, registry=None) -> Span:
    reg = registry or default_registry()
    rep = reg.certify(name, strict=True)
    lo, hi = rep.latencies[(src, dst)]
    return Span(lo, hi)


def path(*steps, registry=None) -> Span:
    """Sum of steps: Wire objects, HOP, (template, in, out) triples or raw spans."""
    out = ZERO
    for s in steps:
        if s is HOP:
            out += (1, 1)
        elif isinstance(s, Span):
            out += s
        elif isinstance(s, tuple) and len(s) == 3 and isinstance(s[0], str):
            out += template_span(*s, registry=registry)
        elif isinstance(s, int):
            out += (s, s)
        else:
            out += wire_span(s)
    return out
