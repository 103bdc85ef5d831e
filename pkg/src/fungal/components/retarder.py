"""Delay lines of fixed outer size.

Small caps (D <= 12) use the basic meander box.  Larger caps use a snake:
vertical runs on odd block columns joined alternately at the bottom and top,
entered at the top-left block and left through a lane along the top row.
Shortening the first two runs trims the delay in steps of two cycles, so
every target in range is met with at most one cycle of overshoot.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..engine import HV, Configuration, run
from .template import SIGNAL, ComponentTemplate, Polarity, Port, Role, Side

BASE_DELAY = 12
BASE_MOVES = ["R1", "U2", "R2", "D4", "R2", "U2", "R2"]


class DelayTooLarge(ValueError):
    pass


def walk(start, moves):
    """Block path from ``start`` following moves like 'R2', 'U1', 'D4', 'L3'."""
    r, c = start
    out = [(r, c)]
    for m in moves:
        dr, dc = {"R": (0, 1), "L": (0, -1), "U": (-1, 0), "D": (1, 0)}[m[0]]
        for _ in range(int(m[1:])):
            r, c = r + dr, c + dc
            out.append((r, c))
    return out


def blocks_to_cells(path, hb, wb):
    g = np.zeros((2 * hb, 2 * wb), np.uint8)
    for r, c in path:
        g[2 * r : 2 * r + 2, 2 * c : 2 * c + 2] = 3
    return g


def _wire_template(name, path, hb, wb, a, b, delay):
    ports = {
        "x": Port("x", Role.INPUT, None, Side.LEFT, *a),
        "z": Port("z", Role.OUTPUT, None, Side.RIGHT, *b),
    }
    return ComponentTemplate(name, blocks_to_cells(path, hb, wb), ports, width=len(path) - 1,
                             delay=delay)


def snake_moves(hb, wb, k, d=None):
    """Run-length moves of the snake with ``k`` vertical runs.

    The first two runs reach row ``d`` (default: the bottom row); the rest
    span rows 2..hb-1.  Runs sit on odd block columns.
    """
    return list(iter_snake_moves(hb, wb, k, d))


def iter_snake_moves(hb, wb, k, d=None):
    """Same moves as ``snake_moves``, generated one at a time."""
    d = hb - 1 if d is None else d
    if k == 0:
        yield ("R", wb - 1)
        return
    if not 3 <= d <= hb - 1:
        raise ValueError("run depth out of range")
    col = 2 * k - 1 + (2 if (k - 1) % 2 == 0 else 0)
    if col > wb - 2:
        raise ValueError("snake does not fit its box")
    yield ("R", 1)
    pending, bottom = ("D", d), d
    for i in range(1, k):
        yield pending
        yield ("R", 2)
        if i % 2:
            pending = ("U", bottom - 2)
        else:
            bottom = hb - 1
            pending = ("D", bottom - 2)
    if (k - 1) % 2 == 0:
        # ended at the bottom: step right and climb to the top lane
        yield pending
        yield ("R", 2)
        yield ("U", bottom)
    else:
        yield ("U", pending[1] + 2)
    yield ("R", wb - 1 - col)


def snake_path(hb, wb, k, d=None):
    return walk((0, 0), [f"{m}{n}" for m, n in snake_moves(hb, wb, k, d)])


def _measure(templates):
    """Exact latencies (min over both polarities) of lone wire templates."""
    lats = []
    for pol in (Polarity.PLUS, Polarity.MINUS):
        cfg = Configuration()
        probes, offsets = [], []
        row = 0
        for t in templates:
            cfg.paste(t.cells, row, 0)
            x = t.port("x")
            cfg.paste(SIGNAL[pol], row + 2 * x.brow, 2 * x.bcol)
            probes.append(t.port("z").sentinel(pol, (row, 0)))
            offsets.append(row)
            row += t.shape[0] + 4
        budget = 4 * (max(t.width for t in templates) + 8)
        _, tr = run(cfg, HV, budget, probes)
        lats.append([tr.first_nonzero[p] // 4 if tr.first_nonzero[p] is not None else -1
                     for p in probes])
    return [min(a, b) for a, b in zip(*lats)]


def box_for(D: int):
    """Outer size in blocks (rows, cols) of every retarder under cap D."""
    if D <= BASE_DELAY:
        return (5, 8)
    hb = max(8, math.isqrt(D) + 2)
    while True:
        wb = 2 * hb
        if snake_latencies(hb, wb)[-1] >= D:
            return (hb, wb)
        hb += 1


def turns(path) -> int:
    return sum(
        (b[0] - a[0], b[1] - a[1]) != (c[0] - b[0], c[1] - b[1])
        for a, b, c in zip(path, path[1:], path[2:])
    )


def path_latency(path) -> int:
    """Latency in cycles of a snake or meander wire, in closed form.

    Straight wire costs one cycle per block and each turn saves half a
    cycle; this matches simulation exactly on every snake measured (see the
    test suite), for both polarities.
    """
    return len(path) - 1 - turns(path) // 2


def moves_latency(moves) -> int:
    return sum(n for _, n in moves) - (len(moves) - 1) // 2


@lru_cache(maxsize=None)
def snake_latencies(hb, wb):
    """Latency of the full-depth snake with k runs, for every feasible k."""
    out = []
    k = 0
    while True:
        try:
            out.append(moves_latency(snake_moves(hb, wb, k)))
        except ValueError:
            return tuple(out)
        k += 1


def snake_choice(hb, wb, delay):
    """Smallest (k, d, latency) with latency >= delay.

    Shortening the first two runs by one block each removes exactly two
    blocks of straight wire, hence exactly two cycles.
    """
    lats = snake_latencies(hb, wb)
    best = None
    for k, lat in enumerate(lats):
        if lat < delay:
            continue
        if k >= 2:
            shave = min((lat - delay) // 2, hb - 1 - 4)
            cand = (lat - 2 * shave, k, hb - 1 - shave)
        else:
            cand = (lat, k, hb - 1)
        if best is None or cand[0] < best[0]:
            best = cand
        if k >= 2 and lat - 2 * (hb - 5) > delay:
            break
    if best is None:
        raise DelayTooLarge(f"no snake in a {hb}x{wb} box reaches {delay} cycles")
    lat, k, d = best
    return k, d, lat


def retarder_moves(delay: int, D: int | None = None):
    """Start block, run-length moves and latency of the delay line for ``delay`` under cap ``D``."""
    if delay < 0:
        raise ValueError("delay must be non-negative")
    D = max(delay, BASE_DELAY) if D is None else D
    if delay > D:
        raise DelayTooLarge(f"delay {delay} exceeds the cap D={D}")
    hb, wb = box_for(D)
    if D <= BASE_DELAY:
        if delay <= wb - 1:
            return (2, 0), [("R", wb - 1)], wb - 1
        return (2, 0), [(m[0], int(m[1:])) for m in BASE_MOVES], BASE_DELAY
    k, d, lat = snake_choice(hb, wb, delay)
    return (0, 0), snake_moves(hb, wb, k, d), lat


def retarder(delay: int, D: int | None = None) -> ComponentTemplate:
    """A delay line with certified latency >= ``delay`` in the box fixed by ``D``."""
    start, moves, lat = retarder_moves(delay, D)
    D = max(delay, BASE_DELAY) if D is None else D
    hb, wb = box_for(D)
    path = walk(start, [f"{m}{n}" for m, n in moves])
    if D <= BASE_DELAY:
        name = "retarder_0" if lat == wb - 1 else "retarder_base"
        return _wire_template(name, path, hb, wb, (2, 0), (2, wb - 1), lat)
    t = _wire_template(f"retarder_{delay}", path, hb, wb, (0, 0), (0, wb - 1), lat)
    k, d, _ = snake_choice(hb, wb, delay)
    t.meta.update(runs=k, depth=d, cap=D)
    return t
