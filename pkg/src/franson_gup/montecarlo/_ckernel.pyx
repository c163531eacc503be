# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-tally loop. Must stay draw-for-draw identical to _pykernel."""
from libc.stdint cimport uint64_t, int64_t

import numpy as np

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef uint64_t SLOTS = 8


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline double unit(uint64_t key, uint64_t ctr) noexcept nogil:
    return <double>(mix64(key + ctr * GAMMA) >> 11) * INV_2_53


cdef void _tally(uint64_t key, int64_t start, int64_t stop,
                 double p_same, double p_cross, double same_hi,
                 double sl_lo, double sl_hi, double ls_lo, double ls_hi,
                 double eta1, double eta2, int64_t* out) noexcept nogil:
    cdef int64_t i
    cdef uint64_t base, path
    cdef double u, p
    cdef bint cross, d1, d2
    cdef int64_t coinc = 0, accid = 0, n_cross = 0, cross_rej = 0, singles = 0, same_rej = 0
    for i in range(start, stop):
        base = <uint64_t>i * SLOTS
        path = mix64(key + base * GAMMA) >> 62
        u = unit(key, base + 1)
        cross = path == 1 or path == 2
        if cross:
            n_cross += 1
            if path == 1:
                if not (u >= sl_lo and u < sl_hi):
                    cross_rej += 1
                    continue
            else:
                if not (u >= ls_lo and u < ls_hi):
                    cross_rej += 1
                    continue
            p = p_cross
        else:
            if not (u < same_hi):
                same_rej += 1
                continue
            p = p_same
        if not (unit(key, base + 2) < p):
            continue
        d1 = unit(key, base + 3) < eta1
        d2 = unit(key, base + 4) < eta2
        if d1 and d2:
            coinc += 1
            if cross:
                accid += 1
        elif d1 or d2:
            singles += 1
    out[0] = coinc
    out[1] = accid
    out[2] = n_cross
    out[3] = cross_rej
    out[4] = singles
    out[5] = same_rej


def tally(uint64_t key, int64_t start, int64_t stop, double p_same, double p_cross,
          double same_hi, double sl_lo, double sl_hi, double ls_lo, double ls_hi,
          double eta1, double eta2):
    """Count outcomes for pairs ``start <= i < stop``; releases the GIL."""
    counts = np.zeros(6, dtype=np.int64)
    cdef int64_t[::1] view = counts
    with nogil:
        _tally(key, start, stop, p_same, p_cross, same_hi, sl_lo, sl_hi,
               ls_lo, ls_hi, eta1, eta2, &view[0])
    return counts
