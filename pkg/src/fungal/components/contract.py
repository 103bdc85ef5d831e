"""Behavioral contracts: timed stimuli and expected port outcomes.

A contract file holds optional ``window <lo> <hi>`` and ``quiet <cells>``
lines followed by scenarios::

    scenario gate_first: gate@0 source@0..W => drain FIRES
    scenario reverse: z+@0 => x* SILENT

A stimulus ``port[pol]@a`` injects at cycle ``a``; ``a..b`` sweeps a range
and ``W`` stands for the upper end of the offset window.  Expectations name
an output port with an optional polarity (``*`` means either) followed by
FIRES, SILENT, or ``FIRES>=k`` (fires no earlier than k cycles after the
last stimulus).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

from .template import Polarity

_STIM = re.compile(r"^(\w+)([+\-]?)@(\w+)(?:\.\.(\w+))?$")
_EXP = re.compile(r"^(\w+)([+\-*]?)$")


@dataclass(frozen=True)
class Stimulus:
    port: str
    polarity: Polarity | None
    lo: int | str
    hi: int | str

    def cycles(self, window_hi):
        val = lambda v: window_hi if v == "W" else int(v)
        return range(val(self.lo), val(self.hi) + 1)


@dataclass(frozen=True)
class Expectation:
    port: str
    polarity: Polarity | None  # None: either polarity
    fires: bool
    any_polarity: bool = False
    min_latency: int = 0


@dataclass
class Scenario:
    name: str
    stimuli: list
    expected: list

    def offsets(self, window_hi):
        """All injection-time combinations, as dicts port -> cycle."""
        ranges = [s.cycles(window_hi) for s in self.stimuli]
        for combo in itertools.product(*ranges):
            yield dict(zip((s.port for s in self.stimuli), combo))


@dataclass
class BehavioralContract:
    scenarios: list = field(default_factory=list)
    offset_window: tuple | None = None  # None: derived from the template
    quiet_zone: int = 2

    @classmethod
    def from_text(cls, text: str) -> "BehavioralContract":
        bc = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            ln = raw.split("#", 1)[0].strip()
            if not ln:
                continue
            try:
                if ln.startswith("window"):
                    lo, hi = ln.split()[1:]
                    bc.offset_window = (int(lo), int(hi))
                elif ln.startswith("quiet"):
                    bc.quiet_zone = int(ln.split()[1])
                elif ln.startswith("scenario"):
                    bc.scenarios.append(_scenario(ln[len("scenario"):]))
                else:
                    raise ValueError("unknown directive")
            except (ValueError, KeyError) as e:
                raise ValueError(f"contract line {lineno}: {raw.strip()!r}: {e}") from None
        return bc

    @classmethod
    def load(cls, path) -> "BehavioralContract":
        return cls.from_text(Path(path).read_text())


def _scenario(body: str) -> Scenario:
    name, rest = body.split(":", 1)
    lhs, rhs = rest.split("=>")
    stims = []
    for tok in lhs.split():
        m = _STIM.match(tok)
        if not m:
            raise ValueError(f"bad stimulus {tok!r}")
        port, pol, lo, hi = m.groups()
        stims.append(Stimulus(port, Polarity.parse(pol) if pol else None, lo, hi or lo))
    exps = []
    toks = rhs.replace(",", " ").split()
    if len(toks) % 2:
        raise ValueError("expectations come in <port> <outcome> pairs")
    for port_tok, outcome in zip(toks[::2], toks[1::2]):
        m = _EXP.match(port_tok)
        if not m:
            raise ValueError(f"bad port {port_tok!r}")
        port, pol = m.groups()
        lat = 0
        if outcome.startswith("FIRES>="):
            lat = int(outcome[len("FIRES>="):])
            outcome = "FIRES"
        if outcome not in ("FIRES", "SILENT"):
            raise ValueError(f"bad outcome {outcome!r}")
        exps.append(Expectation(port, None if pol in ("", "*") else Polarity.parse(pol),
                                outcome == "FIRES", pol == "*", lat))
    return Scenario(name.strip(), stims, exps)
