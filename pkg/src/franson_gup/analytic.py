"""Closed-form Franson coincidence rates with and without the GUP correction.

The coincidence rate is (R0/4) cos^2(Phi/2) where
Phi = dE dT / hbar + beta dE_p dT / hbar + phi1 + phi2. The GUP correction
does two things: it rescales R0 to R0 + 2 beta (R'1 + R'2), and it translates
the fringe by beta dE_p dT / hbar.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .core import ModeCoefficients

SCAN_AXES = ("phi1", "phi2", "delta_t", "beta")


@dataclass(frozen=True)
class PhaseDecomposition:
    phi1_prime: float
    phi2_prime: float
    total: float


@dataclass(frozen=True)
class Spectrum:
    axis: str
    values: np.ndarray
    rates: np.ndarray
    std_errors: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        rates = np.asarray(self.rates, dtype=float)
        if values.ndim != 1 or values.shape != rates.shape:
            raise ValueError("values and rates must be 1-D arrays of equal length")
        if np.any(np.diff(values) <= 0):
            raise ValueError("spectrum parameter values must be strictly increasing")
        if np.any(rates < 0):
            raise ValueError("spectrum rates must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "rates", rates)
        if self.std_errors is not None:
            err = np.asarray(self.std_errors, dtype=float)
            if err.shape != rates.shape:
                raise ValueError("std_errors must match rates in length")
            object.__setattr__(self, "std_errors", err)

    def __len__(self):
        return len(self.values)


def _finite(**kw):
    for name, value in kw.items():
        if not np.all(np.isfinite(value)):
            raise ValueError(f"non-finite input for {name}")


def total_phase(
    delta_e, delta_e_p, beta, delta_t, phi1, phi2, hbar: float = 1.0
) -> PhaseDecomposition:
    _finite(delta_e=delta_e, delta_e_p=delta_e_p, beta=beta, delta_t=delta_t,
            phi1=phi1, phi2=phi2, hbar=hbar)
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    if np.any(np.asarray(delta_t) <= 0):
        raise ValueError("delta_t must be positive")
    dynamic = delta_e * delta_t / hbar + beta * delta_e_p * delta_t / hbar
    return PhaseDecomposition(
        phi1_prime=phi1 / 2.0,
        phi2_prime=-(phi2 + dynamic) / 2.0,
        total=dynamic + (phi1 + phi2),
    )


def fringe_shift(beta, delta_e_p, delta_t, hbar: float = 1.0):
    """Phase translation of the fringe pattern caused by beta."""
    return beta * delta_e_p * delta_t / hbar


def damping_visibility(delta_t: float, tau1: float, tau3: float) -> float:
    """exp(-dT * dw) with dw = 1/tau1 + 1/tau3; optional, the ideal law uses 1."""
    return math.exp(-delta_t * (1.0 / tau1 + 1.0 / tau3))


def _fringe(total, visibility):
    if visibility == 1.0:
        return np.cos(total / 2.0) ** 2
    if not 0.0 <= visibility <= 1.0:
        raise ValueError("visibility must lie in [0, 1]")
    return (1.0 + visibility * np.cos(total)) / 2.0


def _as_scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def rate_baseline(r0, phi1, phi2, delta_e, delta_t, hbar: float = 1.0, visibility: float = 1.0):
    """(R0/4) cos^2((dE dT/hbar + phi1 + phi2)/2). Broadcasts over array phases."""
    if r0 < 0:
        raise ValueError("R0 must be non-negative")
    ph = total_phase(delta_e, 0.0, 0.0, delta_t, phi1, phi2, hbar)
    return _as_scalar(r0 / 4.0 * _fringe(ph.total, visibility))


def mode_overlaps(modes: ModeCoefficients) -> tuple[float, float, float]:
    """Return (R0, R'1, R'2) as Hermitian inner products of the coefficient sequences."""
    c, cp = modes.as_arrays()
    norm = float(np.vdot(c, c).real)
    cross = float(np.vdot(c, cp).real)
    r_prime = norm * cross
    return norm * norm, r_prime, r_prime


def r0_gup(modes: ModeCoefficients, beta: float) -> float:
    """R0 + 2 beta (R'1 + R'2), clamped at zero outside the perturbative regime."""
    if not isinstance(modes, ModeCoefficients):
        raise TypeError("modes must be ModeCoefficients")
    r0, r1, r2 = mode_overlaps(modes)
    value = r0 + 2.0 * beta * (r1 + r2)
    if value < 0:
        warnings.warn(
            f"first-order R0^GUP={value:.6g} is negative; clamped to 0 "
            "(beta is outside the perturbative regime)",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    return value


def rate_gup(
    modes: ModeCoefficients,
    beta,
    delta_e,
    delta_e_p,
    delta_t,
    phi1,
    phi2,
    hbar: float = 1.0,
    visibility: float = 1.0,
):
    if np.ndim(beta) == 0:
        r0 = r0_gup(modes, float(beta))
    else:
        r0 = np.array([r0_gup(modes, float(b)) for b in np.ravel(beta)]).reshape(np.shape(beta))
    ph = total_phase(delta_e, delta_e_p, beta, delta_t, phi1, phi2, hbar)
    return _as_scalar(r0 / 4.0 * _fringe(ph.total, visibility))


@dataclass(frozen=True)
class RateParams:
    """Everything the analytic rate depends on, in one replaceable bundle."""

    modes: ModeCoefficients
    delta_e: float
    delta_e_p: float
    delta_t: float
    beta: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    hbar: float = 1.0
    visibility: float = 1.0

    def rate(self):
        return rate_gup(self.modes, self.beta, self.delta_e, self.delta_e_p, self.delta_t,
                        self.phi1, self.phi2, self.hbar, self.visibility)

    def phase(self) -> PhaseDecomposition:
        return total_phase(self.delta_e, self.delta_e_p, self.beta, self.delta_t,
                           self.phi1, self.phi2, self.hbar)

    def shift(self) -> float:
        return fringe_shift(self.beta, self.delta_e_p, self.delta_t, self.hbar)

    def rate_at(self, phi1, phi2):
        """Rate as a function of the two interferometer phases (broadcasting)."""
        return rate_gup(self.modes, self.beta, self.delta_e, self.delta_e_p, self.delta_t,
                        phi1, phi2, self.hbar, self.visibility)


def axis_values(start: float, stop: float, samples: int, endpoint: bool = False) -> np.ndarray:
    if samples < 2:
        raise ValueError("a scan needs at least 2 samples")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ValueError("scan range must be finite")
    if not stop > start:
        raise ValueError(f"empty scan range [{start}, {stop}]")
    return np.linspace(start, stop, samples, endpoint=endpoint)


def scan_spectrum(
    params: RateParams,
    axis: str,
    start: float,
    stop: float,
    samples: int,
    endpoint: bool = False,
    rate: Callable[[RateParams], float] = RateParams.rate,
) -> Spectrum:
    """Sample ``rate`` uniformly along one parameter axis."""
    if axis not in SCAN_AXES:
        raise ValueError(f"unknown scan axis {axis!r}; expected one of {SCAN_AXES}")
    values = axis_values(start, stop, samples, endpoint)
    rates = [float(rate(replace(params, **{axis: float(v)}))) for v in values]
    return Spectrum(axis, values, np.array(rates))


def visibility(spectrum: Spectrum) -> float:
    hi = float(np.max(spectrum.rates))
    lo = float(np.min(spectrum.rates))
    if hi + lo == 0:
        return 0.0
    return (hi - lo) / (hi + lo)
