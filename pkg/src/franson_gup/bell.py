"""Correlations and CHSH statistics built from Franson coincidence rates.

A rate function here is any callable ``rate(phi1, phi2)`` that is
non-negative and 2*pi periodic in both arguments. Rate functions that accept
numpy arrays make :func:`max_chsh` much faster, but scalar-only callables
are supported too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

RateFunction = Callable[[float, float], float]

TWO_PI = 2.0 * math.pi
TSIRELSON = 2.0 * math.sqrt(2.0)
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PhasePair:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("phase settings must be finite")


@dataclass(frozen=True)
class ChshResult:
    s_value: float
    settings: tuple[float, float, float, float]
    correlations: tuple[float, float, float, float]

    def to_dict(self) -> dict:
        return {
            "s_value": self.s_value,
            "settings": list(self.settings),
            "correlations": list(self.correlations),
        }


class UndefinedCorrelation(ValueError):
    """All four rates entering a correlation vanished."""


def _correlation(rate, a, b):
    pi = math.pi
    r_pp = rate(a, b)
    r_mm = rate(a + pi, b + pi)
    r_mp = rate(a + pi, b)
    r_pm = rate(a, b + pi)
    num = r_pp + r_mm - r_mp - r_pm
    den = r_pp + r_mm + r_mp + r_pm
    return num, den


def correlation(rate: RateFunction, p: PhasePair) -> float:
    """E(a, b) from the four rates at settings shifted by pi.

    For the ideal Franson law this is cos(a + b + theta).
    """
    num, den = _correlation(rate, p.a, p.b)
    if den == 0:
        raise UndefinedCorrelation(f"all four rates vanish at (a, b) = ({p.a}, {p.b})")
    return float(num / den)


def chsh(rate: RateFunction, a: float, a2: float, b: float, b2: float) -> ChshResult:
    """S = E(a, b) + E(a, b') + E(a', b) - E(a', b')."""
    e = (
        correlation(rate, PhasePair(a, b)),
        correlation(rate, PhasePair(a, b2)),
        correlation(rate, PhasePair(a2, b)),
        correlation(rate, PhasePair(a2, b2)),
    )
    return ChshResult(e[0] + e[1] + e[2] - e[3], (a, a2, b, b2), e)


def _s_from_grid(E: np.ndarray) -> np.ndarray:
    # S[i, i', j, j'] = E[i, j] + E[i, j'] + E[i', j] - E[i', j']
    return (
        E[:, None, :, None]
        + E[:, None, None, :]
        + E[None, :, :, None]
        - E[None, :, None, :]
    )


def _grid_correlations(rate, grid):
    A, B = np.meshgrid(grid, grid, indexing="ij")
    try:
        num, den = _correlation(rate, A, B)
        num = np.asarray(num, dtype=float)
        den = np.asarray(den, dtype=float)
        if num.shape != A.shape:
            raise TypeError("rate function does not broadcast")
    except (TypeError, ValueError):
        vec = np.vectorize(lambda x, y: _correlation(rate, x, y), otypes=[float, float])
        num, den = vec(A, B)
    if np.any(den == 0):
        raise UndefinedCorrelation("rate function vanishes on the search grid")
    return num / den


def _best_on_grid(S: np.ndarray) -> tuple[int, ...]:
    # lowest lexicographic index among values within TIE_TOLERANCE of the max
    flat = S.ravel()
    best = flat.max()
    idx = int(np.flatnonzero(flat >= best - TIE_TOLERANCE)[0])
    return tuple(int(i) for i in np.unravel_index(idx, S.shape))


def max_chsh(
    rate: RateFunction,
    resolution: int = 32,
    refinements: int = 3,
    xatol: float = 1e-11,
) -> ChshResult:
    """Maximise S over all four settings.

    A full grid of ``resolution`` points per axis on [0, 2 pi) picks the
    starting point (ties go to the lowest lexicographic settings), then
    ``refinements`` rounds of coordinate ascent polish it. Each round updates
    b, b', a, a' in that order, each within one grid step of its current value.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8 per axis")
    grid = np.arange(resolution) * (TWO_PI / resolution)
    E = _grid_correlations(rate, grid)
    i, i2, j, j2 = _best_on_grid(_s_from_grid(E))
    x = [float(grid[i]), float(grid[i2]), float(grid[j]), float(grid[j2])]
    step = TWO_PI / resolution

    def s_of(v):
        return chsh(rate, *v).s_value

    best = s_of(x)
    for _ in range(refinements):
        for k in (2, 3, 0, 1):
            def neg(t, k=k):
                y = list(x)
                y[k] = t
                return -s_of(y)

            res = minimize_scalar(
                neg, bounds=(x[k] - step, x[k] + step), method="bounded",
                options={"xatol": xatol},
            )
            if -res.fun > best:
                x[k] = float(res.x)
                best = -res.fun
    return chsh(rate, *x)


def wrap_phase(x, period: float = TWO_PI):
    """Map ``x`` into [-period/2, period/2)."""
    return (np.asarray(x) + period / 2.0) % period - period / 2.0


def fixed_settings_s(theta: float, visibility: float = 1.0) -> float:
    """Closed-form S at settings (0, pi/2, -pi/4, pi/4) for E = V cos(a + b + theta)."""
    return 2.0 * math.sqrt(2.0) * visibility * math.cos(theta)
