"""Placement, injection, detection and certification of templates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..engine import HV, Configuration, run
from .contract import BehavioralContract
from .template import SIGNAL, ComponentTemplate, Polarity, PolarityMismatch, Port, Role


class OverlapError(ValueError):
    pass


class CertificationFailure(AssertionError):
    pass


class Unconnected(ValueError):
    pass


def stamp(c: Configuration, t: ComponentTemplate, origin=(0, 0), *, inplace=False) -> Configuration:
    """Copy ``t`` into ``c`` with its top-left block at block coordinate ``origin``."""
    r, col = 2 * origin[0], 2 * origin[1]
    h, w = t.shape
    if c.window(r, col, h, w).any():
        raise OverlapError(f"{t.name} at block {origin} overlaps existing cells")
    out = c if inplace else c.copy()
    out.paste(t.cells, r, col)
    out.extend_support(r, col, h, w)
    return out


def inject(c: Configuration, p: Port, pol: Polarity, origin=(0, 0), *, inplace=False,
           check=True) -> Configuration:
    """Replace the port's block by the canonical signal of polarity ``pol``.

    ``check=False`` skips the polarity check; certification uses it to push
    foreign signals backwards into output ports.
    """
    pol = Polarity.parse(pol)
    if check and p.polarity is not None and pol is not p.polarity:
        raise PolarityMismatch(f"port {p.name} is {p.polarity}, got {pol}")
    out = c if inplace else c.copy()
    r, col = 2 * (origin[0] + p.brow), 2 * (origin[1] + p.bcol)
    out.paste(SIGNAL[pol], r, col)
    return out


def detect(tr, p: Port, pol: Polarity | None = None, origin=(0, 0)):
    """First cycle at which the port's sentinel became non-zero, or None.

    With ``pol`` None the earlier of the two sentinels counts.
    """
    cells = [p.sentinel(pol, origin)] if pol else list(p.sentinels(origin).values())
    times = [tr.first_nonzero.get(cell) for cell in cells]
    times = [x for x in times if x is not None]
    return min(times) // 4 if times else None


def arrival(tr, p: Port, origin=(0, 0)):
    """(cycle, polarity) of the first signal leaving through ``p``, or None.

    Polarity is read off which sentinel was hit first; a tie counts as the
    port's declared polarity.
    """
    s = p.sentinels(origin)
    tp, tm = tr.first_nonzero.get(s[Polarity.PLUS]), tr.first_nonzero.get(s[Polarity.MINUS])
    if tp is None and tm is None:
        return None
    if tm is None or (tp is not None and tp < tm):
        return tp // 4, Polarity.PLUS
    if tp is None or tm < tp:
        return tm // 4, Polarity.MINUS
    return tp // 4, p.polarity or Polarity.PLUS


def wire_distance(t: ComponentTemplate, a: Port | str, b: Port | str) -> int:
    """Shortest block path between two ports through non-empty blocks."""
    a = t.port(a) if isinstance(a, str) else a
    b = t.port(b) if isinstance(b, str) else b
    hb, wb = t.blocks
    occ = t.cells.reshape(hb, 2, wb, 2).any(axis=(1, 3))
    start, goal = (a.brow, a.bcol), (b.brow, b.bcol)
    if not occ[start] or not occ[goal]:
        raise Unconnected(f"{t.name}: port block is empty")
    dist = {start: 0}
    q = deque([start])
    while q:
        u = q.popleft()
        if u == goal:
            return dist[u]
        for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0)):
            v = (u[0] + dr, u[1] + dc)
            if 0 <= v[0] < hb and 0 <= v[1] < wb and occ[v] and v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    raise Unconnected(f"{t.name}: no wire path from {a.name} to {b.name}")


# -- simulation of a lone template ----------------------------------------------


@dataclass
class Run:
    """Outcome of one timed simulation of a template."""

    injections: dict
    outcome: dict  # port -> (cycle, polarity) or None
    leaks: list
    end_time: int
    config: Configuration = field(repr=False, default=None)


def simulate(t: ComponentTemplate, injections: dict, *, quiet: int = 2, cap_cycles: int = 400,
             config: Configuration | None = None, start: int = 0) -> Run:
    """Inject signals (port -> (polarity, cycle)) and run until stable.

    Every non-input port is observed through its two sentinels.  Leaks are
    cells outside the footprint plus ``quiet`` that ever reach state >= 4.
    """
    cfg = config.copy() if config is not None else Configuration.from_array(t.cells)
    h, w = t.shape
    probes = sorted({s for p in t.ports.values() for s in p.sentinels().values()})
    events = sorted(((cyc, name, pol) for name, (pol, cyc) in injections.items()), key=lambda e: e[0])
    firsts = {}
    leaks = []
    now = start

    def advance(until):
        nonlocal cfg, now
        cfg, tr = run(cfg, HV, max(0, until - now), record=True, start=now, inplace=True)
        rec = tr.records
        for cell in probes:
            if cell not in firsts:
                hit = np.flatnonzero((rec[1] == cell[0]) & (rec[2] == cell[1]) & (rec[4] > rec[3]))
                if len(hit):
                    firsts[cell] = int(rec[0, hit[0]]) + 1
        hot = rec[4] >= 4
        out = (rec[1] < -quiet) | (rec[1] >= h + quiet) | (rec[2] < -quiet) | (rec[2] >= w + quiet)
        bad = rec[:, hot & out]
        leaks.extend((int(x[0]), int(x[1]), int(x[2])) for x in bad.T)
        now = 4 * (until // 4) if tr.stable and until > now else tr.end

    for cyc, name, pol in events:
        if 4 * cyc > now:
            advance(4 * cyc)
        now = max(now, 4 * cyc)
        port = t.port(name)
        inject(cfg, port, pol, inplace=True, check=port.role.incoming)
    last = events[-1][0] if events else start // 4
    advance(4 * (last + cap_cycles))

    class _T:
        # a sentinel fires when it first receives a grain
        first_nonzero = firsts

    outcome = {p.name: arrival(_T, p) for p in t.ports.values() if not p.role.incoming}
    outcome.update({p.name: arrival(_T, p) for p in t.ports.values() if p.role.incoming})
    return Run(dict(injections), outcome, leaks, now, cfg)


# -- certification ----------------------------------------------------------------------


@dataclass
class CertificationReport:
    name: str
    runs: int = 0
    failures: list = field(default_factory=list)
    latencies: dict = field(default_factory=dict)  # (input, output) -> (min, max) cycles
    timing_boundary: int | None = None
    leaks: int = 0
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        lat = ", ".join(f"{a}->{b}: {lo}..{hi}" for (a, b), (lo, hi) in sorted(self.latencies.items()))
        extra = f"; switch boundary gate-source <= {self.timing_boundary}" if self.timing_boundary is not None else ""
        first = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"{self.name}: {status} ({self.runs} runs; latency {lat or 'n/a'}{extra}){first}"


def default_window(t: ComponentTemplate):
    hb, wb = t.blocks
    return (0, 2 * 2 * (hb + wb))


def certify(t: ComponentTemplate, bc: BehavioralContract, *, strict: bool = True,
            single_use: bool = True) -> CertificationReport:
    """Run every scenario at every offset in the window and check outcomes.

    Raises CertificationFailure on the first violation when ``strict``.
    """
    rep = CertificationReport(t.name)
    lo, hi = bc.offset_window or default_window(t)
    fired_gap, silent_gap = [], []
    for sc in bc.scenarios:
        for offs in sc.offsets(hi):
            inj = {}
            for s in sc.stimuli:
                port = t.port(s.port)
                inj[s.port] = (s.polarity or port.polarity or Polarity.PLUS, offs[s.port] + lo)
            r = simulate(t, inj, quiet=bc.quiet_zone, cap_cycles=4 * (hi + 4 * sum(t.blocks)))
            rep.runs += 1
            last = max((c for _, c in inj.values()), default=0)
            problems = _check(t, sc, r, last)
            if r.leaks:
                rep.leaks += len(r.leaks)
                problems.append(f"toppling outside quiet zone at (t, r, c)={r.leaks[0]}")
            if not problems and single_use and any(e.fires for e in sc.expected):
                problems += _reuse(t, sc, r, bc.quiet_zone)
            for e in sc.expected:
                got = r.outcome.get(e.port)
                if e.fires and got is not None:
                    # attribute latency to the stimulus that arrived last
                    for name, (_, cyc) in inj.items():
                        if cyc != last:
                            continue
                        key = (name, e.port)
                        lat = got[0] - cyc
                        if lat < 0:
                            continue
                        a, b = rep.latencies.get(key, (lat, lat))
                        rep.latencies[key] = (min(a, lat), max(b, lat))
            roles = {p.role: p.name for p in t.ports.values()}
            if Role.GATE in roles and roles[Role.GATE] in inj and roles[Role.SOURCE] in inj:
                gap = inj[roles[Role.GATE]][1] - inj[roles[Role.SOURCE]][1]
                (fired_gap if r.outcome[roles[Role.DRAIN]] else silent_gap).append(gap)
            if problems:
                msg = f"scenario {sc.name}, injections {_fmt(inj)}: {problems[0]}"
                rep.failures.append(msg)
                if strict:
                    raise CertificationFailure(f"{t.name}: {msg}")
    if fired_gap:
        rep.timing_boundary = max(fired_gap)
        if silent_gap and min(silent_gap) <= rep.timing_boundary:
            rep.notes.append("switch timing is not monotone in the gate-source gap")
    return rep


def _fmt(inj):
    return ", ".join(f"{k}{p}@{c}" for k, (p, c) in inj.items())


def _check(t, sc, r, last):
    problems = []
    for e in sc.expected:
        got = r.outcome.get(e.port)
        if e.fires:
            if got is None:
                problems.append(f"{e.port} expected to fire, stayed silent")
            elif e.polarity is not None and got[1] is not e.polarity:
                problems.append(f"{e.port} fired with polarity {got[1]}, expected {e.polarity}")
            elif e.min_latency and got[0] - last < e.min_latency:
                problems.append(f"{e.port} fired after {got[0] - last} cycles, expected >= {e.min_latency}")
        elif got is not None and (e.polarity is None or got[1] is e.polarity):
            problems.append(f"{e.port} expected silent, fired at cycle {got[0]} ({got[1]})")
    return problems


def _reuse(t, sc, r, quiet):
    """Re-inject each stimulus into the spent component; outputs must stay quiet."""
    problems = []
    for s in sc.stimuli:
        port = t.port(s.port)
        pol = s.polarity or port.polarity or Polarity.PLUS
        cyc = r.end_time // 4 + 1
        again = simulate(t, {s.port: (pol, cyc)}, quiet=quiet, config=r.config, start=r.end_time)
        for p in t.outputs():
            if again.outcome.get(p.name) is not None:
                problems.append(f"single use violated: re-injecting {s.port} fired {p.name}")
        if again.leaks:
            problems.append(f"re-injecting {s.port} leaked at {again.leaks[0]}")
    return problems
