"""Compiled inner loop of the stepper.

Cell bytes carry the state in the low three bits.  Bit 6 marks a probed
cell and bit 7 is scratch used to deduplicate candidates within one step;
both are cleared by the Python driver before a configuration is handed back.
"""

import numpy as np
from numba import njit

CHUNK_SHIFT = 6
CHUNK = 1 << CHUNK_SHIFT
MASK = CHUNK - 1

VALUE = 0x3F
PROBE = 0x40
SEEN = 0x80

# statuses returned by run_kernel
DONE = 0
STABLE = 1
NEED_POOL = 2
NEED_FRAME = 3
NEED_RECORD = 4
PROBED = 5
NEED_ACT = 6


@njit(cache=True, inline="always")
def _locate(cidx, r0, c0, r, c):
    rr = r - r0
    cc = c - c0
    return cidx[rr >> CHUNK_SHIFT, cc >> CHUNK_SHIFT], rr & MASK, cc & MASK


@njit(cache=True)
def run_kernel(pool, cidx, meta, act, seq, probes, first_nz, rec, counters):
    """Advance the configuration in place.

    meta     int64[8]: r0, c0, n_chunks, t, t_end, n_act, rec_len, stop_on_probe
    act      int64[2, cap]: active cells (rows, cols); first n_act valid
    probes   int64[2, k]
    first_nz int64[k], -1 while unseen
    rec      int64[5, cap]: step, row, col, old, new (empty when recording off)
    counters int64[8]: topplings, writes, rmin, rmax, cmin, cmax, 0, 0
    """
    r0 = meta[0]
    c0 = meta[1]
    n_chunks = meta[2]
    t = meta[3]
    t_end = meta[4]
    n_act = meta[5]
    n_rec = meta[6]
    stop_on_probe = meta[7]
    cap_pool = pool.shape[0]
    fr = cidx.shape[0] << CHUNK_SHIFT
    fc = cidx.shape[1] << CHUNK_SHIFT
    cap_act = act.shape[1]
    cap_rec = rec.shape[1]
    n_seq = seq.shape[0]
    n_probe = probes.shape[1]
    cand_r = np.empty(3 * cap_act, np.int64)
    cand_c = np.empty(3 * cap_act, np.int64)
    cand_old = np.empty(3 * cap_act, np.int64)
    new_r = np.empty(cap_act, np.int64)
    new_c = np.empty(cap_act, np.int64)
    status = DONE

    while True:
        if n_act == 0:
            status = STABLE
            break
        if t >= t_end:
            status = DONE
            break
        horizontal = seq[t % n_seq] == 0
        dr = 0 if horizontal else 1
        dc = 1 if horizontal else 0

        # make sure every target cell has backing storage
        ok = True
        for i in range(n_act):
            for s in (-1, 1):
                r = act[0, i] + s * dr
                c = act[1, i] + s * dc
                rr = r - r0
                cc = c - c0
                if rr < 0 or cc < 0 or rr >= fr or cc >= fc:
                    status = NEED_FRAME
                    ok = False
                    break
                br = rr >> CHUNK_SHIFT
                bc = cc >> CHUNK_SHIFT
                if cidx[br, bc] < 0:
                    if n_chunks >= cap_pool:
                        status = NEED_POOL
                        ok = False
                        break
                    cidx[br, bc] = n_chunks
                    n_chunks += 1
            if not ok:
                break
        if not ok:
            break
        if cap_rec > 0 and n_rec + 3 * n_act > cap_rec:
            status = NEED_RECORD
            break
        if 3 * n_act > cap_act:
            # the next active set is bounded by the candidate count
            status = NEED_ACT
            break

        # candidates and their pre-step values
        n_cand = 0
        for i in range(n_act):
            r = act[0, i]
            c = act[1, i]
            for k in range(3):
                if k == 0:
                    rc, cc_ = r, c
                elif k == 1:
                    rc, cc_ = r - dr, c - dc
                else:
                    rc, cc_ = r + dr, c + dc
                ci, lr, lc = _locate(cidx, r0, c0, rc, cc_)
                cand_r[n_cand] = rc
                cand_c[n_cand] = cc_
                cand_old[n_cand] = pool[ci, lr, lc] & 0x07
                n_cand += 1

        # simultaneous update: linear in the critical set, so order is free
        for i in range(n_act):
            r = act[0, i]
            c = act[1, i]
            ci, lr, lc = _locate(cidx, r0, c0, r, c)
            pool[ci, lr, lc] -= 2
            for s in (-1, 1):
                rn = r + s * dr
                cn = c + s * dc
                ci, lr, lc = _locate(cidx, r0, c0, rn, cn)
                pool[ci, lr, lc] += 1
                if rn < counters[2]:
                    counters[2] = rn
                if rn > counters[3]:
                    counters[3] = rn
                if cn < counters[4]:
                    counters[4] = cn
                if cn > counters[5]:
                    counters[5] = cn
        counters[0] += n_act
        counters[1] += 3 * n_act

        # new active set, records and probes (dedup via the scratch bit)
        n_new = 0
        fired = False
        for j in range(n_cand):
            ci, lr, lc = _locate(cidx, r0, c0, cand_r[j], cand_c[j])
            raw = pool[ci, lr, lc]
            if raw & SEEN:
                continue
            pool[ci, lr, lc] = raw | SEEN
            v = raw & 0x07
            if v != cand_old[j]:
                if cap_rec > 0:
                    rec[0, n_rec] = t
                    rec[1, n_rec] = cand_r[j]
                    rec[2, n_rec] = cand_c[j]
                    rec[3, n_rec] = cand_old[j]
                    rec[4, n_rec] = v
                    n_rec += 1
                if raw & PROBE and cand_old[j] == 0:
                    for p in range(n_probe):
                        if probes[0, p] == cand_r[j] and probes[1, p] == cand_c[j]:
                            if first_nz[p] < 0:
                                first_nz[p] = t + 1
                                fired = True
            if v >= 4:
                new_r[n_new] = cand_r[j]
                new_c[n_new] = cand_c[j]
                n_new += 1
        for j in range(n_cand):
            ci, lr, lc = _locate(cidx, r0, c0, cand_r[j], cand_c[j])
            pool[ci, lr, lc] = pool[ci, lr, lc] & 0x7F
        for i in range(n_new):
            act[0, i] = new_r[i]
            act[1, i] = new_c[i]
        n_act = n_new
        t += 1
        if fired and stop_on_probe:
            status = PROBED
            break

    meta[2] = n_chunks
    meta[3] = t
    meta[5] = n_act
    meta[6] = n_rec
    return status
