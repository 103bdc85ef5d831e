"""Finite-support configurations on a chunked grid."""

from __future__ import annotations

import numpy as np

from .kernel import CHUNK, CHUNK_SHIFT

GLYPHS = {0: "-", 1: "."}
_PARSE = {"-": 0, ".": 1, **{str(v): v for v in range(2, 8)}}


class Configuration:
    """A cell map Z^2 -> {0..7} with finitely many nonzero cells.

    Storage is a pool of 64x64 chunks plus an index grid (``cidx``) that maps
    chunk coordinates inside the current frame to pool slots, -1 meaning an
    all-zero chunk with no backing store.  The active set (cells >= 4) and
    the grain total are kept alongside so that stability and conservation
    queries are O(1).
    """

    def __init__(self):
        self.pool = np.zeros((4, CHUNK, CHUNK), np.uint8)
        self.cidx = np.full((1, 1), -1, np.int32)
        self.r0 = 0
        self.c0 = 0
        self.n_chunks = 0
        self._active = np.zeros((2, 0), np.int64)
        self._dirty = False
        self.grain_total = 0
        self._support = None  # (rmin, rmax, cmin, cmax), inclusive

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls) -> "Configuration":
        return cls()

    @classmethod
    def from_array(cls, a, origin=(0, 0)) -> "Configuration":
        a = np.asarray(a)
        c = cls()
        if a.size:
            c.paste(a, origin[0], origin[1])
            c.extend_support(origin[0], origin[1], a.shape[0], a.shape[1])
        return c

    def copy(self) -> "Configuration":
        c = Configuration.__new__(Configuration)
        c.pool = self.pool[: max(self.n_chunks, 1)].copy()
        c.cidx = self.cidx.copy()
        c.r0, c.c0, c.n_chunks = self.r0, self.c0, self.n_chunks
        c._active = self.active.copy()
        c._dirty = False
        c.grain_total = self.grain_total
        c._support = self._support
        return c

    # -- frame and pool management ----------------------------------------

    def _ensure_frame(self, rmin, rmax, cmin, cmax, slack=1):
        fr0, fc0 = self.r0, self.c0
        fr1 = fr0 + (self.cidx.shape[0] << CHUNK_SHIFT) - 1
        fc1 = fc0 + (self.cidx.shape[1] << CHUNK_SHIFT) - 1
        if self.n_chunks == 0 and (self.cidx < 0).all():
            fr0 = fr1 = fc0 = fc1 = None
        if fr0 is not None and rmin >= fr0 and rmax <= fr1 and cmin >= fc0 and cmax <= fc1:
            return
        lo_r = rmin if fr0 is None else min(rmin, fr0)
        hi_r = rmax if fr1 is None else max(rmax, fr1)
        lo_c = cmin if fc0 is None else min(cmin, fc0)
        hi_c = cmax if fc1 is None else max(cmax, fc1)
        nr0 = ((lo_r >> CHUNK_SHIFT) - slack) << CHUNK_SHIFT
        nc0 = ((lo_c >> CHUNK_SHIFT) - slack) << CHUNK_SHIFT
        nr = ((hi_r - nr0) >> CHUNK_SHIFT) + 1 + slack
        nc = ((hi_c - nc0) >> CHUNK_SHIFT) + 1 + slack
        cidx = np.full((nr, nc), -1, np.int32)
        if fr0 is not None:
            dr = (self.r0 - nr0) >> CHUNK_SHIFT
            dc = (self.c0 - nc0) >> CHUNK_SHIFT
            h, w = self.cidx.shape
            cidx[dr : dr + h, dc : dc + w] = self.cidx
        self.cidx, self.r0, self.c0 = cidx, nr0, nc0

    def _grow_pool(self, need):
        cap = self.pool.shape[0]
        if need <= cap:
            return
        new = max(need, 2 * cap)
        pool = np.zeros((new, CHUNK, CHUNK), np.uint8)
        pool[: self.n_chunks] = self.pool[: self.n_chunks]
        self.pool = pool

    def _slot(self, br, bc):
        s = self.cidx[br, bc]
        if s < 0:
            self._grow_pool(self.n_chunks + 1)
            s = self.n_chunks
            self.cidx[br, bc] = s
            self.n_chunks += 1
        return s

    # -- bulk writes --------------------------------------------------------

    def paste(self, a, r, c, mode="set"):
        """Write array ``a`` with its top-left corner at cell (r, c).

        mode "set" overwrites, "add" adds grain counts.  Chunks that would
        stay all-zero are not allocated.
        """
        a = np.asarray(a)
        h, w = a.shape
        if h == 0 or w == 0:
            return
        if a.min() < 0 or a.max() > 7:
            raise ValueError("cell states must lie in 0..7")
        self._ensure_frame(r, r + h - 1, c, c + w - 1)
        rr, cc = r - self.r0, c - self.c0
        for br in range(rr >> CHUNK_SHIFT, ((rr + h - 1) >> CHUNK_SHIFT) + 1):
            ra = max(rr, br << CHUNK_SHIFT)
            rb = min(rr + h, (br + 1) << CHUNK_SHIFT)
            for bc in range(cc >> CHUNK_SHIFT, ((cc + w - 1) >> CHUNK_SHIFT) + 1):
                ca = max(cc, bc << CHUNK_SHIFT)
                cb = min(cc + w, (bc + 1) << CHUNK_SHIFT)
                sub = a[ra - rr : rb - rr, ca - cc : cb - cc]
                if self.cidx[br, bc] < 0 and not sub.any():
                    continue
                s = self._slot(br, bc)
                view = self.pool[s, ra - (br << CHUNK_SHIFT) : rb - (br << CHUNK_SHIFT),
                                 ca - (bc << CHUNK_SHIFT) : cb - (bc << CHUNK_SHIFT)]
                old = view.astype(np.int64)
                new = sub.astype(np.int64) + (old if mode == "add" else 0)
                if new.max(initial=0) > 7:
                    raise ValueError("cell state would exceed 7")
                view[...] = new
                self.grain_total += int(new.sum() - old.sum())
        nz = np.argwhere(a)
        if len(nz):
            self._touch(r + nz[:, 0].min(), r + nz[:, 0].max(), c + nz[:, 1].min(), c + nz[:, 1].max())
        self._dirty = True

    def _poke(self, r, c, v):
        # single-cell write used by replay; caller refreshes the active set
        self._ensure_frame(r, r, c, c)
        s = self._slot((r - self.r0) >> CHUNK_SHIFT, (c - self.c0) >> CHUNK_SHIFT)
        rr, cc = (r - self.r0) & (CHUNK - 1), (c - self.c0) & (CHUNK - 1)
        self.grain_total += v - int(self.pool[s, rr, cc])
        self.pool[s, rr, cc] = v
        self._touch(r, r, c, c)
        self._dirty = True

    def set_cell(self, r, c, v):
        self.paste(np.array([[v]]), r, c)

    def extend_support(self, r, c, h, w):
        """Declare the rectangle as part of the support (zeros allowed)."""
        if h > 0 and w > 0:
            self._touch(r, r + h - 1, c, c + w - 1)

    def _touch(self, rmin, rmax, cmin, cmax):
        s = self._support
        if s is None:
            self._support = (int(rmin), int(rmax), int(cmin), int(cmax))
        else:
            self._support = (min(s[0], int(rmin)), max(s[1], int(rmax)),
                             min(s[2], int(cmin)), max(s[3], int(cmax)))

    @property
    def active(self) -> np.ndarray:
        """Critical cells as an int64 array of shape (2, k), rows then cols."""
        if self._dirty:
            self.refresh_active()
        return self._active

    @active.setter
    def active(self, value):
        self._active = value
        self._dirty = False

    def refresh_active(self):
        """Rebuild the active set by scanning allocated chunks."""
        self._dirty = False
        if self.n_chunks == 0:
            self._active = np.zeros((2, 0), np.int64)
            return
        slots = np.full(self.n_chunks, -1, np.int64)
        brs, bcs = np.nonzero(self.cidx >= 0)
        slots[self.cidx[brs, bcs]] = np.arange(len(brs))
        k, lr, lc = np.nonzero(self.pool[: self.n_chunks] >= 4)
        j = slots[k]
        rows = self.r0 + (brs[j] << CHUNK_SHIFT) + lr
        cols = self.c0 + (bcs[j] << CHUNK_SHIFT) + lc
        order = np.lexsort((cols, rows))
        self._active = np.stack([rows[order], cols[order]]).astype(np.int64)

    # -- reads --------------------------------------------------------------

    def __getitem__(self, rc):
        r, c = rc
        rr, cc = r - self.r0, c - self.c0
        if rr < 0 or cc < 0:
            return 0
        br, bc = rr >> CHUNK_SHIFT, cc >> CHUNK_SHIFT
        if br >= self.cidx.shape[0] or bc >= self.cidx.shape[1]:
            return 0
        s = self.cidx[br, bc]
        if s < 0:
            return 0
        return int(self.pool[s, rr & (CHUNK - 1), cc & (CHUNK - 1)])

    def window(self, r, c, h, w) -> np.ndarray:
        """Dense copy of the h x w rectangle whose top-left cell is (r, c)."""
        out = np.zeros((h, w), np.uint8)
        if h <= 0 or w <= 0:
            return out
        rr, cc = r - self.r0, c - self.c0
        H, W = self.cidx.shape
        for br in range(max(rr >> CHUNK_SHIFT, 0), min(((rr + h - 1) >> CHUNK_SHIFT) + 1, H)):
            ra = max(rr, br << CHUNK_SHIFT)
            rb = min(rr + h, (br + 1) << CHUNK_SHIFT)
            for bc in range(max(cc >> CHUNK_SHIFT, 0), min(((cc + w - 1) >> CHUNK_SHIFT) + 1, W)):
                s = self.cidx[br, bc]
                if s < 0:
                    continue
                ca = max(cc, bc << CHUNK_SHIFT)
                cb = min(cc + w, (bc + 1) << CHUNK_SHIFT)
                out[ra - rr : rb - rr, ca - cc : cb - cc] = self.pool[
                    s, ra - (br << CHUNK_SHIFT) : rb - (br << CHUNK_SHIFT),
                    ca - (bc << CHUNK_SHIFT) : cb - (bc << CHUNK_SHIFT)]
        return out

    @property
    def support(self):
        """(row0, col0, rows, cols) of the support rectangle."""
        if self._support is None:
            return (0, 0, 0, 0)
        r0, r1, c0, c1 = self._support
        return (r0, c0, r1 - r0 + 1, c1 - c0 + 1)

    def to_array(self):
        r, c, h, w = self.support
        return self.window(r, c, h, w)

    def is_stable(self) -> bool:
        return self.active.shape[1] == 0

    def active_cells(self):
        return [tuple(map(int, rc)) for rc in self.active.T]

    def grain_sum(self) -> int:
        return self.grain_total

    def count_nonzero(self) -> int:
        return int(np.count_nonzero(self.pool[: self.n_chunks]))

    def nbytes(self) -> int:
        return int(self.pool.nbytes + self.cidx.nbytes)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        if self.grain_total != other.grain_total:
            return False
        a, b = self.support, other.support
        r0, c0 = min(a[0], b[0]), min(a[1], b[1])
        r1 = max(a[0] + a[2], b[0] + b[2])
        c1 = max(a[1] + a[3], b[1] + b[3])
        return np.array_equal(self.window(r0, c0, r1 - r0, c1 - c0),
                              other.window(r0, c0, r1 - r0, c1 - c0))

    __hash__ = None

    # -- text format ----------------------------------------------------------

    def to_text(self) -> str:
        r, c, h, w = self.support
        lines = [f"rect {r} {c} {h} {w}"]
        lines += [row_text(row) for row in self.window(r, c, h, w)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Configuration":
        (r, c, h, w), a, _ = parse_grid(text.splitlines())
        return cls.from_array(a, (r, c)) if a.size else _declared(cls(), r, c, h, w)

    def __repr__(self):
        r, c, h, w = self.support
        return (f"Configuration(rect=({r}, {c}, {h}, {w}), grains={self.grain_total}, "
                f"active={self.active.shape[1]})")


def _declared(cfg, r, c, h, w):
    cfg.extend_support(r, c, h, w)
    return cfg


_ROW_TABLE = np.array([ord(ch) for ch in "-.234567"], np.uint8)


def row_text(row) -> str:
    return _ROW_TABLE[np.asarray(row, np.int64)].tobytes().decode("ascii")


def parse_grid(lines):
    """Parse a ``rect`` header and grid rows; return (rect, array, rest).

    Lines after the grid are returned untouched so that callers can read
    trailers (ports, probes, bounds).
    """
    lines = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("rect"):
        raise ValueError("missing 'rect <row0> <col0> <rows> <cols>' header")
    parts = lines[0].split()
    if len(parts) != 5:
        raise ValueError(f"malformed header: {lines[0]!r}")
    r, c, h, w = (int(x) for x in parts[1:])
    if h < 0 or w < 0:
        raise ValueError("negative rectangle size")
    body = lines[1 : 1 + h]
    if len(body) != h:
        raise ValueError(f"expected {h} grid rows, found {len(body)}")
    a = np.zeros((h, w), np.uint8)
    for i, ln in enumerate(body):
        ln = ln.rstrip("\n")
        if len(ln) != w:
            raise ValueError(f"row {i} has {len(ln)} cells, expected {w}")
        try:
            a[i] = [_PARSE[ch] for ch in ln]
        except KeyError as e:
            raise ValueError(f"bad glyph {e.args[0]!r} in row {i}") from None
    return (r, c, h, w), a, lines[1 + h :]
