"""Level energies and first-order GUP corrections for solvable model systems.

With the quadratic deformation P = p (1 + beta p^2) the kinetic term becomes
p^2/2m + beta p^4/m + O(beta^2), so the first-order shift of level n is
<n|p^4|n>/m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.polynomial import chebyshev as cheb

SUPPORTED_DEFORMATIONS = ("quadratic",)


@dataclass(frozen=True)
class HarmonicOscillator:
    mass: float
    omega: float

    ground_index = 0

    def __post_init__(self):
        if not (self.mass > 0 and self.omega > 0):
            raise ValueError("oscillator mass and omega must be positive")
        if not (math.isfinite(self.mass) and math.isfinite(self.omega)):
            raise ValueError("oscillator parameters must be finite")


@dataclass(frozen=True)
class InfiniteWell:
    mass: float
    width: float

    ground_index = 1

    def __post_init__(self):
        if not (self.mass > 0 and self.width > 0):
            raise ValueError("well mass and width must be positive")
        if not (math.isfinite(self.mass) and math.isfinite(self.width)):
            raise ValueError("well parameters must be finite")


ModelSystem = Union[HarmonicOscillator, InfiniteWell]


@dataclass(frozen=True)
class LevelMap:
    """Quantum numbers assigned to cascade levels 1, 2, 3 (top to bottom)."""

    n1: int
    n2: int
    n3: int

    def check(self, system: ModelSystem) -> None:
        for n in (self.n1, self.n2, self.n3):
            if int(n) != n:
                raise ValueError(f"quantum numbers must be integers, got {n!r}")
        if not (self.n1 > self.n2 > self.n3):
            raise ValueError(
                f"level map must satisfy n1 > n2 > n3, got ({self.n1}, {self.n2}, {self.n3})"
            )
        if self.n3 < system.ground_index:
            raise ValueError(
                f"n3={self.n3} is below the ground index {system.ground_index} "
                f"of {type(system).__name__}"
            )


@dataclass(frozen=True)
class LevelEnergies:
    e: float
    e_p: float


def _check_level(system: ModelSystem, n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"quantum number must be an integer, got {n!r}")
    n = int(n)
    if n < system.ground_index:
        raise ValueError(
            f"n={n} is not a valid level of {type(system).__name__} "
            f"(lowest is {system.ground_index})"
        )
    return n


def _check_deformation(deformation: str) -> None:
    if deformation not in SUPPORTED_DEFORMATIONS:
        raise NotImplementedError(f"deformation {deformation!r} is not implemented")


def unperturbed_energy(system: ModelSystem, n: int, hbar: float = 1.0) -> float:
    n = _check_level(system, n)
    if isinstance(system, HarmonicOscillator):
        return hbar * system.omega * (n + 0.5)
    if isinstance(system, InfiniteWell):
        return (n * math.pi * hbar) ** 2 / (2.0 * system.mass * system.width**2)
    raise TypeError(f"unsupported model system {system!r}")


def perturbation_energy(
    system: ModelSystem, n: int, hbar: float = 1.0, deformation: str = "quadratic"
) -> float:
    """First-order coefficient E_p with E_GUP = E + beta * E_p."""
    _check_deformation(deformation)
    n = _check_level(system, n)
    if isinstance(system, HarmonicOscillator):
        m, w = system.mass, system.omega
        return m * hbar**2 * w**2 * (6 * n * n + 6 * n + 3) / 4.0
    if isinstance(system, InfiniteWell):
        return (n * math.pi * hbar / system.width) ** 4 / system.mass
    raise TypeError(f"unsupported model system {system!r}")


def level_energies(
    system: ModelSystem, n: int, hbar: float = 1.0, deformation: str = "quadratic"
) -> LevelEnergies:
    return LevelEnergies(
        unperturbed_energy(system, n, hbar), perturbation_energy(system, n, hbar, deformation)
    )


def momentum_matrix(size: int, mass: float, omega: float, hbar: float = 1.0) -> np.ndarray:
    """p in the oscillator number basis, truncated to ``size`` states.

    p = i sqrt(m hbar omega / 2) (a^dagger - a). The result is Hermitian.
    """
    a = np.diag(np.sqrt(np.arange(1, size, dtype=float)), k=1)
    return 1j * math.sqrt(mass * hbar * omega / 2.0) * (a.T - a)


def _well_p4_quadrature(system: InfiniteWell, n: int, hbar: float, degree: int) -> float:
    # ||p^2 psi||^2 with psi'' from a Chebyshev interpolant, integrated by Gauss-Legendre
    L = system.width
    k = n * math.pi / L

    def psi(x):
        return math.sqrt(2.0 / L) * np.sin(k * x)

    # map [0, L] <- [-1, 1]
    series = cheb.Chebyshev.interpolate(lambda t: psi((t + 1.0) * L / 2.0), degree)
    d2 = series.deriv(2)
    nodes, weights = np.polynomial.legendre.leggauss(degree + 8)
    scale = (2.0 / L) ** 2
    p2psi = hbar**2 * scale * d2(nodes)
    return float(np.dot(weights, p2psi**2) * L / 2.0) / system.mass


def perturbation_energy_oracle(
    system: ModelSystem,
    n: int,
    basis_size: int = 64,
    hbar: float = 1.0,
    deformation: str = "quadratic",
) -> float:
    """Independent numerical evaluation of E_p.

    Oscillator: diagonal element of p^4 assembled from ladder matrices in a
    truncated number basis. Well: quadrature of |p^2 psi_n|^2 with the second
    derivative taken numerically. ``basis_size`` doubles as the polynomial
    degree for the well.
    """
    _check_deformation(deformation)
    n = _check_level(system, n)
    if basis_size < n + 20:
        raise ValueError(f"basis_size={basis_size} too small for n={n}; need >= n + 20")
    if isinstance(system, HarmonicOscillator):
        p = momentum_matrix(basis_size, system.mass, system.omega, hbar)
        p2 = p @ p
        p4 = p2 @ p2
        return float(p4[n, n].real) / system.mass
    if isinstance(system, InfiniteWell):
        degree = max(basis_size, 40 + 6 * n)
        return _well_p4_quadrature(system, n, hbar, degree)
    raise TypeError(f"unsupported model system {system!r}")


def cascade_deltas(
    system: ModelSystem, levels: LevelMap, hbar: float = 1.0, deformation: str = "quadratic"
) -> tuple[float, float]:
    """Return (delta_e, delta_e_p) = (E1 - E3, E1_p - E3_p) for the mapped cascade."""
    levels.check(system)
    top = level_energies(system, levels.n1, hbar, deformation)
    bottom = level_energies(system, levels.n3, hbar, deformation)
    return top.e - bottom.e, top.e_p - bottom.e_p
