"""Vectorised numpy version of the pair-tally loop (fallback when the extension is absent)."""
from __future__ import annotations

import numpy as np

from ._rng import GAMMA, MIX1, MIX2, SLOTS

_GAMMA = np.uint64(GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_SLOTS = np.uint64(SLOTS)
_S30, _S27, _S31, _S11, _S62 = (np.uint64(s) for s in (30, 27, 31, 11, 62))
_INV_2_53 = 1.0 / (1 << 53)

CHUNK = 1 << 16


def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def _unit(key, ctr):
    return (_mix64(key + ctr * _GAMMA) >> _S11).astype(np.float64) * _INV_2_53


def _tally_chunk(key, start, stop, p_same, p_cross, same_hi, sl_lo, sl_hi, ls_lo, ls_hi,
                 eta1, eta2):
    base = np.arange(start, stop, dtype=np.uint64) * _SLOTS
    path = _mix64(key + base * _GAMMA) >> _S62
    u = _unit(key, base + np.uint64(1))

    sl = path == 1
    ls = path == 2
    cross = sl | ls
    same = ~cross
    sl_ok = sl & (u >= sl_lo) & (u < sl_hi)
    ls_ok = ls & (u >= ls_lo) & (u < ls_hi)
    same_ok = same & (u < same_hi)
    cross_ok = sl_ok | ls_ok

    p = np.where(cross, p_cross, p_same)
    accepted = (cross_ok | same_ok) & (_unit(key, base + np.uint64(2)) < p)
    d1 = _unit(key, base + np.uint64(3)) < eta1
    d2 = _unit(key, base + np.uint64(4)) < eta2
    both = accepted & d1 & d2
    one = accepted & (d1 ^ d2)
    return np.array([
        np.count_nonzero(both),
        np.count_nonzero(both & cross),
        np.count_nonzero(cross),
        np.count_nonzero(cross & ~cross_ok),
        np.count_nonzero(one),
        np.count_nonzero(same & ~same_ok),
    ], dtype=np.int64)


def tally(key, start, stop, p_same, p_cross, same_hi, sl_lo, sl_hi, ls_lo, ls_hi, eta1, eta2):
    key = np.uint64(key)
    counts = np.zeros(6, dtype=np.int64)
    with np.errstate(over="ignore"):
        for lo in range(start, stop, CHUNK):
            hi = min(lo + CHUNK, stop)
            counts += _tally_chunk(key, lo, hi, p_same, p_cross, same_hi, sl_lo, sl_hi,
                                   ls_lo, ls_hi, eta1, eta2)
    return counts
