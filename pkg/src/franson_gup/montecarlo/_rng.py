"""Counter-based random stream shared by every Monte-Carlo backend.

Draw ``k`` of a stream keyed by ``key`` is ``mix64(key + k * GAMMA)``, the
SplitMix64 output function evaluated at an arbitrary position. Any draw can
be computed without touching the others, so work can be split across
threads or backends and still reproduce the same numbers.

Pair ``i`` owns counters ``SLOTS * i + slot``.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
SEED_GAMMA = 0xD1B54A32D192ED03
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)

SLOTS = 8
SLOT_PATH = 0
SLOT_JITTER = 1
SLOT_CHANNEL = 2
SLOT_DET1 = 3
SLOT_DET2 = 4
SLOT_EMISSION = 5


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def stream_key(seed: int) -> int:
    return mix64(check_seed(seed) + GAMMA)


def derive_seed(master: int, index: int) -> int:
    """Sub-seed for point ``index`` of a sweep; independent of the other points."""
    return mix64(check_seed(master) ^ mix64((index + 1) * SEED_GAMMA))


def draw(key: int, counter: int) -> int:
    return mix64(key + counter * GAMMA)


def to_unit(z: int) -> float:
    return (z >> 11) * INV_2_53
