"""Independent oracles: a dense full-grid stepper and a recursive circuit evaluator.

Nothing here imports the package's engine or evaluator, so agreement with
them is evidence rather than tautology.
"""

from __future__ import annotations

import numpy as np


def dense_step(a: np.ndarray, axis: str) -> np.ndarray:
    """One simultaneous update of a zero-padded dense grid (axis 'H' or 'V')."""
    crit = (a >= 4).astype(np.int64)
    out = a.astype(np.int64) - 2 * crit
    if axis == "H":
        out[:, 1:] += crit[:, :-1]
        out[:, :-1] += crit[:, 1:]
    else:
        out[1:, :] += crit[:-1, :]
        out[:-1, :] += crit[1:, :]
    return out


def dense_run(a: np.ndarray, steps: int, pad: int | None = None):
    """Dense HV evolution for ``steps`` steps; returns the list of frames (padded)."""
    pad = steps + 1 if pad is None else pad
    g = np.pad(np.asarray(a, np.int64), pad)
    frames = [g]
    for t in range(steps):
        g = dense_step(g, "HV"[t % 2])
        frames.append(g)
    return frames


def wire(blocks: int, source: bool = True) -> np.ndarray:
    """A straight positive wire, ``blocks`` blocks long, with a source in block 0."""
    a = np.full((2, 2 * blocks), 3, np.int64)
    if source:
        a[0, 0] = 4
    return a


def naive_eval(gates, output, bits):
    """Recursive evaluation of (g, type, g1, g2) tuples; no memo, no ordering assumptions."""
    by_g = {g: (t, a, b) for g, t, a, b in gates}

    def val(g):
        t, a, b = by_g[g]
        if t == "INPUT":
            return bits[g - 1]
        x, y = val(a), val(b)
        return {"NAND": 1 - (x & y), "AND": x & y, "OR": x | y, "NOT": 1 - x}[t]

    return val(output)


def tuples(cd):
    return [(x.g, x.t.value, x.g1, x.g2) for x in cd.gates]
