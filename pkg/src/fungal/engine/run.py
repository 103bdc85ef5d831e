"""Stepping, cycles and bounded runs with traces."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernel as K
from .config import Configuration


class CellState(int):
    """An integer state in 0..7; states >= 4 are critical."""

    def __new__(cls, value):
        v = int(value)
        if not 0 <= v <= 7:
            raise ValueError(f"cell state {value!r} outside 0..7")
        return super().__new__(cls, v)

    @property
    def critical(self) -> bool:
        return self >= 4


class Axis(enum.IntEnum):
    HORIZONTAL = 0
    VERTICAL = 1

    @property
    def symbol(self):
        return "HV"[self]


H, V = Axis.HORIZONTAL, Axis.VERTICAL


class UpdateSequence(tuple):
    """Nonempty cyclic schedule of axes; default HV."""

    def __new__(cls, symbols=(H, V)):
        if isinstance(symbols, str):
            symbols = [{"H": H, "V": V}[s] for s in symbols.upper()]
        syms = tuple(Axis(s) for s in symbols)
        if not syms:
            raise ValueError("update sequence must be nonempty")
        return super().__new__(cls, syms)

    def axis_at(self, t: int) -> Axis:
        return self[t % len(self)]

    def __repr__(self):
        return "UpdateSequence(%r)" % "".join(a.symbol for a in self)


HV = UpdateSequence()


@dataclass
class Trace:
    """Deltas of a run plus first-nonzero times of probed cells.

    ``records`` is an int64 array of shape (5, k) with rows
    (step, row, col, old, new), ordered by step.  Step ``t`` is the
    transition from time t to t+1.  ``first_nonzero`` maps each probe to the
    time (number of applied steps) at which it was first seen non-zero, or
    None.
    """

    seq: UpdateSequence
    start: int
    end: int
    first_nonzero: dict
    records: np.ndarray = field(repr=False, default_factory=lambda: np.zeros((5, 0), np.int64))
    topplings: int = 0
    writes: int = 0
    stable: bool = False

    @property
    def steps_executed(self) -> int:
        return self.end - self.start

    def steps(self):
        """Yield (step index, axis, cells (k, 2), new states) per recorded step."""
        for t, _, cells, new in _group(self.records):
            yield t, self.seq.axis_at(t), cells.copy(), new.copy()

    def replay(self, initial: Configuration, upto: int | None = None) -> Configuration:
        """Rebuild the configuration at time ``upto`` (default: end of run)."""
        c = initial.copy()
        rec = self.records
        if upto is not None:
            rec = rec[:, rec[0] < upto]
        for t, _, cells, new in _group(rec):
            for (r, col), v in zip(cells, new):
                c._poke(int(r), int(col), int(v))
        c.refresh_active()
        return c

    def frames(self, initial: Configuration, window, every: int = 4):
        """Yield (time, dense window) every ``every`` steps, starting at time 0."""
        r0, c0, h, w = window
        frame = initial.window(r0, c0, h, w).astype(np.uint8)
        yield self.start, frame.copy()
        rec = self.records
        inside = (rec[1] >= r0) & (rec[1] < r0 + h) & (rec[2] >= c0) & (rec[2] < c0 + w)
        rec = rec[:, inside]
        pos = 0
        for t in range(self.start + every, self.end + 1, every):
            hi = np.searchsorted(rec[0], t, side="left")
            sl = rec[:, pos:hi]
            frame[sl[1] - r0, sl[2] - c0] = sl[4]
            pos = hi
            yield t, frame.copy()


def _group(rec):
    if rec.shape[1] == 0:
        return
    cuts = np.flatnonzero(np.diff(rec[0])) + 1
    for chunk in np.split(np.arange(rec.shape[1]), cuts):
        yield int(rec[0, chunk[0]]), None, rec[1:3, chunk].T, rec[4, chunk]


def run(c: Configuration, seq=HV, max_steps: int = 0, probes=(), *, record: bool = False,
        stop_on_probe: bool = False, start: int = 0, inplace: bool = False):
    """Apply ``seq`` cyclically for ``max_steps`` steps or until stable.

    ``start`` is the global time of ``c``; the axis of step t is seq[t].
    Returns the resulting configuration and its Trace.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    seq = UpdateSequence(seq)
    cfg = c if inplace else c.copy()
    probes = [tuple(map(int, p)) for p in probes]
    first = {p: None for p in probes}
    parr = np.array(probes, np.int64).reshape(-1, 2).T.copy()
    fnz = np.full(len(probes), -1, np.int64)
    for i, (r, col) in enumerate(probes):
        if cfg[r, col] != 0:
            fnz[i] = start
        cfg._ensure_frame(r, r, col, col)
        s = cfg._slot((r - cfg.r0) >> K.CHUNK_SHIFT, (col - cfg.c0) >> K.CHUNK_SHIFT)
        cfg.pool[s, (r - cfg.r0) & K.MASK, (col - cfg.c0) & K.MASK] |= K.PROBE

    n_act = cfg.active.shape[1]
    act = np.zeros((2, max(64, 4 * n_act)), np.int64)
    act[:, :n_act] = cfg.active
    rec = np.zeros((5, 4096 if record else 0), np.int64)
    if cfg._support is None:
        s0 = (0, -1, 0, -1)
    else:
        s0 = cfg._support
    counters = np.array([0, 0, s0[0], s0[1], s0[2], s0[3], 0, 0], np.int64)
    if cfg._support is None:
        counters[2:6] = [np.iinfo(np.int64).max, np.iinfo(np.int64).min,
                         np.iinfo(np.int64).max, np.iinfo(np.int64).min]
    seq_arr = np.array([int(a) for a in seq], np.int64)
    meta = np.array([cfg.r0, cfg.c0, cfg.n_chunks, start, start + max_steps, n_act, 0,
                     int(stop_on_probe)], np.int64)
    if stop_on_probe and (fnz >= 0).any():
        status = K.PROBED
    else:
        while True:
            meta[0], meta[1], meta[2] = cfg.r0, cfg.c0, cfg.n_chunks
            status = K.run_kernel(cfg.pool, cfg.cidx, meta, act, seq_arr, parr, fnz, rec, counters)
            cfg.n_chunks = int(meta[2])
            if status == K.NEED_POOL:
                cfg._grow_pool(2 * cfg.pool.shape[0])
            elif status == K.NEED_FRAME:
                a = act[:, : meta[5]]
                cfg._ensure_frame(a[0].min() - 1, a[0].max() + 1, a[1].min() - 1, a[1].max() + 1,
                                  slack=2)
            elif status == K.NEED_RECORD:
                rec = np.concatenate([rec, np.zeros_like(rec)], axis=1)
            elif status == K.NEED_ACT:
                grown = np.zeros((2, 4 * act.shape[1]), np.int64)
                grown[:, : meta[5]] = act[:, : meta[5]]
                act = grown
            else:
                break

    for r, col in probes:
        br, bc = (r - cfg.r0) >> K.CHUNK_SHIFT, (col - cfg.c0) >> K.CHUNK_SHIFT
        s = cfg.cidx[br, bc]
        cfg.pool[s, (r - cfg.r0) & K.MASK, (col - cfg.c0) & K.MASK] &= K.VALUE
    n_act = int(meta[5])
    cfg.active = act[:, :n_act].copy()
    if counters[0] > 0:
        cfg._touch(counters[2], counters[3], counters[4], counters[5])
    for i, p in enumerate(probes):
        first[p] = int(fnz[i]) if fnz[i] >= 0 else None
    tr = Trace(seq=seq, start=start, end=int(meta[3]), first_nonzero=first,
               records=rec[:, : meta[6]].copy(), topplings=int(counters[0]),
               writes=int(counters[1]), stable=n_act == 0)
    return cfg, tr


def step(c: Configuration, a: Axis) -> Configuration:
    """One simultaneous update along axis ``a``."""
    return run(c, UpdateSequence((a,)), 1)[0]


def cycle(c: Configuration) -> Configuration:
    """Four steps H V H V."""
    return run(c, HV, 4)[0]


def is_stable(c: Configuration) -> bool:
    return c.is_stable()


def grain_sum(c: Configuration) -> int:
    return c.grain_sum()
