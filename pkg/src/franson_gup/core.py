"""Shared domain types and configuration validation.

Internally everything is in natural units (hbar = 1 by default). A
:class:`UnitSystem` with a different ``hbar`` can be passed where energies
and times meet in a phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_HIERARCHY_MIN = 100.0
DEFAULT_MARGIN = 10.0
PERTURBATIVE_LIMIT = 0.1


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar!r}")


@dataclass(frozen=True)
class CascadeSpec:
    """Three-level emitter E1 -> E2 -> E3 with level lifetimes.

    Ordering and lifetime hierarchy are checked by :func:`validate_experiment`,
    not here, so that deliberately broken configurations can be explored.
    """

    e1: float
    e2: float
    e3: float
    tau1: float
    tau2: float
    tau3: float

    @property
    def delta_e(self) -> float:
        return self.e1 - self.e3

    @property
    def linewidth(self) -> float:
        """Uncertainty of the summed photon frequency, 1/tau1 + 1/tau3."""
        return 1.0 / self.tau1 + 1.0 / self.tau3


@dataclass(frozen=True)
class InterferometerConfig:
    delta_t: float
    phi1: float = 0.0
    phi2: float = 0.0
    eta1: float = 1.0
    eta2: float = 1.0
    window: float = 1.0


@dataclass(frozen=True)
class GupParams:
    beta: float = 0.0
    deformation: str = "quadratic"

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and non-negative, got {self.beta!r}")


@dataclass(frozen=True)
class ModeCoefficients:
    """Unperturbed Fourier coefficients ``c`` and their GUP corrections ``c_prime``."""

    c: tuple
    c_prime: tuple

    def __post_init__(self):
        c = tuple(complex(x) for x in self.c)
        cp = tuple(complex(x) for x in self.c_prime)
        if len(c) == 0:
            raise ValueError("at least one mode coefficient is required")
        if len(c) != len(cp):
            raise ValueError(
                f"c and c_prime must have equal length, got {len(c)} and {len(cp)}"
            )
        if not all(cmath_isfinite(x) for x in c + cp):
            raise ValueError("mode coefficients must be finite")
        if not any(x != 0 for x in c):
            raise ValueError("at least one c_k must be nonzero")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "c_prime", cp)

    @classmethod
    def single_mode(cls, c_prime: complex = 0.0) -> "ModeCoefficients":
        return cls((1.0,), (c_prime,))

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.c, dtype=complex), np.asarray(self.c_prime, dtype=complex)


def cmath_isfinite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def add(self, code: str, message: str) -> None:
        self.violations.append(Violation(code, message))

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"code": v.code, "message": v.message} for v in self.violations],
            "warnings": list(self.warnings),
        }


def _require_finite(**values: float) -> None:
    bad = [k for k, v in values.items() if not math.isfinite(v)]
    if bad:
        raise ValueError(f"non-finite input for {', '.join(bad)}")


def validate_experiment(
    cascade: CascadeSpec,
    ifc: InterferometerConfig,
    hierarchy_min: float = DEFAULT_HIERARCHY_MIN,
    margin: float = DEFAULT_MARGIN,
) -> ValidationReport:
    """Check the emitter and interferometer against the Franson regime.

    The strong inequalities tau2 << delta_t << tau1 are read as
    ``delta_t > margin * tau2`` and ``delta_t <= tau1 / margin``. Every
    violated inequality gets its own entry; a non-finite field raises
    ``ValueError`` instead.
    """
    _require_finite(
        e1=cascade.e1, e2=cascade.e2, e3=cascade.e3,
        tau1=cascade.tau1, tau2=cascade.tau2, tau3=cascade.tau3,
        delta_t=ifc.delta_t, phi1=ifc.phi1, phi2=ifc.phi2,
        eta1=ifc.eta1, eta2=ifc.eta2, window=ifc.window,
        hierarchy_min=hierarchy_min, margin=margin,
    )
    if hierarchy_min <= 0 or margin <= 0:
        raise ValueError("hierarchy_min and margin must be positive")

    report = ValidationReport()
    c = cascade
    if not c.e1 > c.e2:
        report.add("energy_order_12", f"E1={c.e1} is not above E2={c.e2}")
    if not c.e2 > c.e3:
        report.add("energy_order_23", f"E2={c.e2} is not above E3={c.e3}")

    lifetimes_positive = True
    for name in ("tau1", "tau2", "tau3"):
        if getattr(c, name) <= 0:
            report.add(f"{name}_nonpositive", f"{name}={getattr(c, name)} must be positive")
            lifetimes_positive = False
    if not c.tau2 < c.tau1:
        report.add("tau_order_21", f"tau2={c.tau2} is not shorter than tau1={c.tau1}")
    if not c.tau1 < c.tau3:
        report.add("tau_order_13", f"tau1={c.tau1} is not shorter than tau3={c.tau3}")
    if lifetimes_positive and c.tau1 / c.tau2 < hierarchy_min:
        report.add(
            "tau_hierarchy",
            f"tau1/tau2={c.tau1 / c.tau2:.6g} is below hierarchy_min={hierarchy_min:.6g}",
        )

    if ifc.delta_t <= 0:
        report.add("delta_t_nonpositive", f"delta_t={ifc.delta_t} must be positive")
    if ifc.delta_t <= margin * c.tau2:
        report.add(
            "delta_t_vs_tau2",
            f"delta_t={ifc.delta_t} is not above margin*tau2={margin * c.tau2:.6g}",
        )
    if ifc.delta_t > c.tau1 / margin:
        report.add(
            "delta_t_vs_tau1",
            f"delta_t={ifc.delta_t} exceeds tau1/margin={c.tau1 / margin:.6g}",
        )
    if ifc.window <= 0:
        report.add("window_nonpositive", f"window={ifc.window} must be positive")
    if ifc.window >= ifc.delta_t:
        report.add(
            "window_vs_delta_t",
            f"window={ifc.window} is not smaller than delta_t={ifc.delta_t}",
        )
    for name in ("eta1", "eta2"):
        eta = getattr(ifc, name)
        if not 0.0 <= eta <= 1.0:
            report.add(f"{name}_range", f"{name}={eta} is outside [0, 1]")
    return report


def perturbative_warnings(beta: float, delta_e: float, delta_e_p: float) -> list[str]:
    """Warn when the first-order energy shift is no longer small against delta_e."""
    if delta_e == 0:
        return ["delta_e is zero; relative GUP shift is undefined"]
    ratio = abs(beta * delta_e_p / delta_e)
    if ratio > PERTURBATIVE_LIMIT:
        return [
            f"beta*delta_e_p/delta_e={ratio:.3g} exceeds {PERTURBATIVE_LIMIT}; "
            "first-order results are unreliable"
        ]
    return []

