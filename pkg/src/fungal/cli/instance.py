"""Prediction instances (R, y, T): file format, loading and the prediction itself.

Small rectangles are written in the engine's row format (``rect``).  The
compiler writes embeddings column by column as run-length lines::

    cols <row0> <col0> <rows> <cols>
    12*- 4*3 20*-          one line per column, top to bottom
    ...
    probe <row> <col>
    bound <T>

A run is ``<count>*<glyph>`` or a bare glyph for a single cell; glyphs are
the engine's ``-.234567``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..engine import HV, Configuration, parse_grid, run
from ..engine.config import _PARSE, row_text

BAND = 256  # columns decoded before each paste


class InstanceFormatError(ValueError):
    pass


@dataclass
class PredictionInstance:
    R: Configuration
    y: tuple
    T: int


def encode_column(cells) -> str:
    cells = np.asarray(cells)
    if cells.size == 0:
        return ""
    cuts = np.flatnonzero(np.diff(cells)) + 1
    starts = np.concatenate(([0], cuts))
    lens = np.diff(np.concatenate((starts, [cells.size])))
    glyphs = row_text(cells[starts])
    return " ".join(g if n == 1 else f"{n}*{g}" for n, g in zip(lens.tolist(), glyphs))


def decode_column(line: str, h: int) -> np.ndarray:
    vals, lens = [], []
    for tok in line.split():
        n, _, g = tok.rpartition("*")
        try:
            vals.append(_PARSE[g])
            lens.append(int(n) if n else 1)
        except (KeyError, ValueError):
            raise InstanceFormatError(f"bad run {tok!r}") from None
    col = np.repeat(np.array(vals, np.uint8), lens)
    if col.size != h:
        raise InstanceFormatError(f"column has {col.size} cells, expected {h}")
    return col


def write_columns(out, chunks, shape, y, T, origin=(0, 0)):
    """Write a column-encoded instance from (col, row0, cells) chunks in column order.

    Chunks may be views into a reused buffer, so each one is copied on arrival.
    """
    h, w = shape
    out.write(f"cols {origin[0]} {origin[1]} {h} {w}\n")
    col, parts = 0, []
    for c, r0, cells in chunks:
        if c != col:
            out.write(encode_column(np.concatenate(parts)) + "\n")
            col, parts = c, []
        parts.append(np.array(cells))
    if parts:
        out.write(encode_column(np.concatenate(parts)) + "\n")
    out.write(f"probe {y[0]} {y[1]}\nbound {T}\n")


def write_rect(out, cfg: Configuration, y, T):
    out.write(cfg.to_text())
    out.write(f"probe {y[0]} {y[1]}\nbound {T}\n")


def _trailer(lines, where):
    y = T = None
    for ln in lines:
        parts = ln.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "probe" and len(parts) == 3:
                y = (int(parts[1]), int(parts[2]))
                continue
            if parts[0] == "bound" and len(parts) == 2:
                T = int(parts[1])
                continue
        except ValueError:
            pass
        raise InstanceFormatError(f"{where}: unexpected line {ln.strip()!r}")
    if y is None or T is None:
        raise InstanceFormatError(f"{where}: missing probe or bound line")
    if T < 0:
        raise InstanceFormatError(f"{where}: negative bound")
    return y, T


def read_instance(path) -> PredictionInstance:
    path = Path(path)
    with path.open() as f:
        head = f.readline()
        parts = head.split()
        if parts[:1] == ["rect"]:
            lines = [head] + f.read().splitlines()
            try:
                (r, c, h, w), a, rest = parse_grid(lines)
            except ValueError as e:
                raise InstanceFormatError(f"{path}: {e}") from None
            cfg = Configuration.from_array(a, (r, c))
            y, T = _trailer(rest, path)
            return PredictionInstance(cfg, y, T)
        if parts[:1] != ["cols"] or len(parts) != 5:
            raise InstanceFormatError(f"{path}: expected a 'rect' or 'cols' header")
        r0, c0, h, w = map(int, parts[1:])
        cfg = Configuration()
        band = np.zeros((h, min(BAND, max(w, 1))), np.uint8)
        for c in range(w):
            line = f.readline()
            if not line:
                raise InstanceFormatError(f"{path}: expected {w} columns, found {c}")
            try:
                band[:, c % BAND] = decode_column(line, h)
            except InstanceFormatError as e:
                raise InstanceFormatError(f"{path}: column {c}: {e}") from None
            if c % BAND == BAND - 1 or c == w - 1:
                k = c % BAND + 1
                cfg.paste(band[:, :k], r0, c0 + c - k + 1)
                band[:] = 0
        cfg.extend_support(r0, c0, h, w)
        y, T = _trailer(f.read().splitlines(), path)
    return PredictionInstance(cfg, y, T)


@dataclass
class Prediction:
    bit: int
    first: int | None  # first step at which y was non-zero
    steps: int
    topplings: int
    stable: bool


def predict(pi: PredictionInstance, max_steps: int | None = None, early_exit: bool = True) -> Prediction:
    """Is y non-zero at some t <= T?  Stops early once y fires or F is stable.

    Both early exits are sound: non-zero cells never return to zero, and
    a stable configuration never changes again.
    """
    T = pi.T if max_steps is None else min(pi.T, max_steps)
    _, tr = run(pi.R, HV, T, [pi.y], stop_on_probe=early_exit)
    first = tr.first_nonzero[tuple(pi.y)]
    return Prediction(int(first is not None), first, tr.steps_executed, tr.topplings, tr.stable)
