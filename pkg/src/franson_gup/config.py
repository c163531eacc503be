"""Run configuration: a TOML document with one table per section.

Parsing is strict. Unknown sections or keys are errors, and every missing
required key is reported in a single :class:`ConfigError`.
"""
from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import MISSING, asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

from .analytic import RateParams
from .core import (
    CascadeSpec, GupParams, InterferometerConfig, ModeCoefficients, ValidationReport,
    perturbative_warnings, validate_experiment,
)
from .montecarlo import MCSetup, PhaseParams
from .perturbation import HarmonicOscillator, InfiniteWell, LevelMap, cascade_deltas, unperturbed_energy


class ConfigError(ValueError):
    """Malformed configuration document."""


@dataclass(frozen=True)
class SystemSection:
    kind: str
    levels: tuple
    mass: float = 1.0
    omega: Optional[float] = None
    width: Optional[float] = None


@dataclass(frozen=True)
class CascadeSection:
    tau1: float
    tau2: float
    tau3: float


@dataclass(frozen=True)
class InterferometerSection:
    delta_t: float
    window: float
    phi1: float = 0.0
    phi2: float = 0.0
    eta1: float = 1.0
    eta2: float = 1.0


@dataclass(frozen=True)
class GupSection:
    beta: float = 0.0
    deformation: str = "quadratic"


@dataclass(frozen=True)
class ModesSection:
    c: tuple = ((1.0, 0.0),)
    c_prime: tuple = ((0.0, 0.0),)


@dataclass(frozen=True)
class UnitsSection:
    hbar: float = 1.0


@dataclass(frozen=True)
class McSection:
    n_pairs: int = 100_000
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class SweepSection:
    axis: str = "phi2"
    start: float = 0.0
    stop: float = 2.0 * math.pi
    samples: int = 16
    endpoint: bool = False
    mode: str = "analytic"
    betas: tuple = ()


@dataclass(frozen=True)
class ChshSection:
    resolution: int = 32
    refinements: int = 3
    settings: tuple = ()
    betas: tuple = ()


@dataclass(frozen=True)
class ValidationSection:
    hierarchy_min: float = 100.0
    margin: float = 10.0
    override: bool = False


@dataclass(frozen=True)
class OutputSection:
    path: str = ""
    format: str = ""


SECTIONS = {
    "system": SystemSection,
    "cascade": CascadeSection,
    "interferometer": InterferometerSection,
    "gup": GupSection,
    "modes": ModesSection,
    "units": UnitsSection,
    "mc": McSection,
    "sweep": SweepSection,
    "chsh": ChshSection,
    "validation": ValidationSection,
    "output": OutputSection,
}
REQUIRED_SECTIONS = ("system", "cascade", "interferometer")


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce(section: str, name: str, default: Any, value: Any, ftype: str):
    where = f"{section}.{name}"
    if ftype in ("float", "Optional[float]"):
        if not _is_number(value):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if ftype == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if ftype == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if ftype == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if ftype == "tuple":
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where}: expected an array, got {value!r}")
        return _freeze(where, value)
    raise AssertionError(ftype)


def _freeze(where, value):
    out = []
    for item in value:
        if isinstance(item, (list, tuple)):
            out.append(_freeze(where, item))
        elif _is_number(item):
            out.append(item)
        else:
            raise ConfigError(f"{where}: array entries must be numbers, got {item!r}")
    return tuple(out)


@dataclass(frozen=True)
class RunConfig:
    system: SystemSection
    cascade: CascadeSection
    interferometer: InterferometerSection
    gup: GupSection = field(default_factory=GupSection)
    modes: ModesSection = field(default_factory=ModesSection)
    units: UnitsSection = field(default_factory=UnitsSection)
    mc: McSection = field(default_factory=McSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    chsh: ChshSection = field(default_factory=ChshSection)
    validation: ValidationSection = field(default_factory=ValidationSection)
    output: OutputSection = field(default_factory=OutputSection)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a table of sections")
        errors, missing = [], []
        for name in doc:
            if name not in SECTIONS:
                errors.append(f"unknown section [{name}]")
        built = {}
        for name, section_cls in SECTIONS.items():
            raw = doc.get(name, {})
            if not isinstance(raw, dict):
                errors.append(f"[{name}] must be a table")
                continue
            known = {f.name: f for f in fields(section_cls)}
            for key in raw:
                if key not in known:
                    errors.append(f"unknown key {name}.{key}")
            kwargs = {}
            for key, f in known.items():
                has_default = f.default is not MISSING or f.default_factory is not MISSING
                if key not in raw:
                    if not has_default and (name in doc or name in REQUIRED_SECTIONS):
                        missing.append(f"{name}.{key}")
                    continue
                ftype = f.type if isinstance(f.type, str) else f.type.__name__
                try:
                    kwargs[key] = _coerce(name, key, f.default, raw[key], ftype)
                except ConfigError as exc:
                    errors.append(str(exc))
            if name in doc or name not in REQUIRED_SECTIONS:
                try:
                    built[name] = section_cls(**kwargs)
                except TypeError:
                    pass  # missing keys already recorded
        if missing:
            errors.insert(0, "missing required keys: " + ", ".join(missing))
        if errors:
            raise ConfigError("; ".join(errors))
        cfg = cls(**built)
        cfg._check_semantics()
        return cfg

    def _check_semantics(self) -> None:
        errors = []
        s = self.system
        if s.kind == "oscillator":
            if s.omega is None:
                errors.append("system.omega is required for kind='oscillator'")
            if s.width is not None:
                errors.append("system.width is not used by kind='oscillator'")
        elif s.kind == "well":
            if s.width is None:
                errors.append("system.width is required for kind='well'")
            if s.omega is not None:
                errors.append("system.omega is not used by kind='well'")
        else:
            errors.append(f"system.kind must be 'oscillator' or 'well', got {s.kind!r}")
        if len(s.levels) != 3 or not all(isinstance(n, int) for n in s.levels):
            errors.append("system.levels must be three integers [n1, n2, n3]")
        for key in ("c", "c_prime"):
            seq = getattr(self.modes, key)
            if not all(isinstance(p, tuple) and len(p) == 2 for p in seq):
                errors.append(f"modes.{key} must be a list of [re, im] pairs")
        if self.sweep.mode not in ("analytic", "mc"):
            errors.append("sweep.mode must be 'analytic' or 'mc'")
        if self.output.format not in ("", "json", "csv"):
            errors.append("output.format must be 'json' or 'csv'")
        if self.sweep.axis == "beta" and self.sweep.betas:
            errors.append("sweep.betas must be empty when sweep.axis = 'beta'")
        if self.chsh.settings and len(self.chsh.settings) != 4:
            errors.append("chsh.settings must be [a, a', b, b']")
        if not 0 <= self.mc.seed < 2**64:
            errors.append("mc.seed must be an unsigned 64-bit integer")
        if self.mc.n_pairs < 1 or self.mc.workers < 1:
            errors.append("mc.n_pairs and mc.workers must be positive")
        if errors:
            raise ConfigError("; ".join(errors))
        try:
            self.model_system()
            self.level_map().check(self.model_system())
            self.gup_params()
            self.mode_coefficients()
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    # --- echo / round trip -------------------------------------------------
    def to_dict(self) -> dict:
        out = {}
        for name in SECTIONS:
            section = asdict(getattr(self, name))
            out[name] = {k: _thaw(v) for k, v in section.items() if v is not None}
        return out

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def with_overrides(self, seed: Optional[int] = None, override_validation: bool = False):
        cfg = self
        if seed is not None:
            cfg = replace(cfg, mc=replace(cfg.mc, seed=seed))
        if override_validation:
            cfg = replace(cfg, validation=replace(cfg.validation, override=True))
        cfg._check_semantics()
        return cfg

    # --- domain objects ----------------------------------------------------
    @property
    def hbar(self) -> float:
        return self.units.hbar

    def model_system(self):
        s = self.system
        if s.kind == "oscillator":
            return HarmonicOscillator(s.mass, s.omega)
        return InfiniteWell(s.mass, s.width)

    def level_map(self) -> LevelMap:
        return LevelMap(*self.system.levels)

    def gup_params(self) -> GupParams:
        return GupParams(self.gup.beta, self.gup.deformation)

    def mode_coefficients(self) -> ModeCoefficients:
        return ModeCoefficients(
            tuple(complex(re, im) for re, im in self.modes.c),
            tuple(complex(re, im) for re, im in self.modes.c_prime),
        )

    def deltas(self) -> tuple[float, float]:
        return cascade_deltas(self.model_system(), self.level_map(), self.hbar,
                              self.gup.deformation)

    def cascade_spec(self) -> CascadeSpec:
        sysm = self.model_system()
        e = [unperturbed_energy(sysm, n, self.hbar) for n in self.system.levels]
        c = self.cascade
        return CascadeSpec(e[0], e[1], e[2], c.tau1, c.tau2, c.tau3)

    def interferometer_config(self) -> InterferometerConfig:
        i = self.interferometer
        return InterferometerConfig(i.delta_t, i.phi1, i.phi2, i.eta1, i.eta2, i.window)

    def rate_params(self, beta: Optional[float] = None) -> RateParams:
        de, de_p = self.deltas()
        i = self.interferometer
        return RateParams(
            self.mode_coefficients(), de, de_p, i.delta_t,
            beta=self.gup.beta if beta is None else beta,
            phi1=i.phi1, phi2=i.phi2, hbar=self.hbar,
        )

    def mc_setup(self, beta: Optional[float] = None) -> MCSetup:
        de, de_p = self.deltas()
        phase = PhaseParams(de, de_p, self.gup.beta if beta is None else beta, self.hbar)
        return MCSetup(self.cascade_spec(), self.interferometer_config(), phase,
                       self.mode_coefficients())

    def validate(self) -> ValidationReport:
        report = validate_experiment(
            self.cascade_spec(), self.interferometer_config(),
            self.validation.hierarchy_min, self.validation.margin,
        )
        de, de_p = self.deltas()
        betas = {self.gup.beta, *self.sweep.betas, *self.chsh.betas}
        for beta in sorted(betas):
            report.warnings.extend(perturbative_warnings(beta, de, de_p))
        return report


def _thaw(v):
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    return v


def load_config(path) -> RunConfig:
    """Read and strictly parse a TOML run configuration.

    Raises ``OSError`` when the file cannot be read and :class:`ConfigError`
    when its content is malformed.
    """
    data = Path(path).read_bytes()
    try:
        doc = tomllib.loads(data.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: not valid TOML ({exc})") from None
    return RunConfig.from_dict(doc)


def loads_config(text: str) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML ({exc})") from None
    return RunConfig.from_dict(doc)
