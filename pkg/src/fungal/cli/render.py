"""Frames of a run: text grids or binary PGM images."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..engine import HV, row_text, run


def ascii_frame(a) -> str:
    return "".join(row_text(row) + "\n" for row in a)


def pgm_frame(a) -> bytes:
    a = np.asarray(a, np.uint8)
    h, w = a.shape
    return f"P5\n{w} {h}\n7\n".encode("ascii") + a.tobytes()


def render(pi, outdir, *, every: int = 1, fmt: str = "ascii", window=None, cycles=None):
    """Write every ``every``-th cycle of the window, up to ``cycles`` cycles (default: until T or stable).

    Returns the written paths.
    """
    if every < 1:
        raise ValueError("every must be at least 1")
    if window is None:
        r, c, h, w = pi.R.support
        window = (r, c, h, w)
    steps = pi.T if cycles is None else min(pi.T, 4 * cycles)
    _, tr = run(pi.R, HV, steps, record=True)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for t, frame in tr.frames(pi.R, window, every=4 * every):
        p = outdir / f"frame_{t // 4:06d}.{'txt' if fmt == 'ascii' else 'pgm'}"
        if fmt == "ascii":
            p.write_text(ascii_frame(frame))
        else:
            p.write_bytes(pgm_frame(frame))
        paths.append(p)
    return paths
