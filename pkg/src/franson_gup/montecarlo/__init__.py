"""Event-level Monte-Carlo of the Franson coincidence experiment.

Each emitted pair picks a path combination (SS, SL, LS, LL) uniformly. The
second photon of the cascade is delayed by an exponential jitter with scale
tau2. Pairs whose arrival-time difference exceeds the coincidence window are
rejected. SS and LL are indistinguishable after post-selection, so they are
merged into one channel whose acceptance carries the interference term
(1 + V cos Phi) / 4; the distinguishable SL and LS pairs are accepted with
probability 1/4 and show up as accidental coincidences. Both acceptances are
scaled by R0^GUP / R0. Finally each detector fires with its efficiency.

Every random number comes from a counter-based stream (see ``_rng``), so a
run is a pure function of its inputs and seed regardless of sharding.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .. import analytic
from ..analytic import Spectrum
from ..core import CascadeSpec, InterferometerConfig, ModeCoefficients, validate_experiment
from . import _backend
from ._rng import (
    SLOT_CHANNEL, SLOT_DET1, SLOT_DET2, SLOT_EMISSION, SLOT_JITTER, SLOT_PATH, SLOTS,
    check_seed, derive_seed, draw, stream_key, to_unit,
)

PATHS = ("SS", "SL", "LS", "LL")
MC_AXES = ("phi1", "phi2", "delta_t", "beta")


@dataclass(frozen=True)
class PhaseParams:
    delta_e: float
    delta_e_p: float
    beta: float = 0.0
    hbar: float = 1.0


@dataclass(frozen=True)
class PairEvent:
    t0: float
    paths: str
    arrival: tuple[float, float]
    detected: tuple[bool, bool]
    coincident: bool


@dataclass(frozen=True)
class CountRecord:
    n_pairs: int
    n_coincident: int
    n_cross_rejected: int
    n_singles: int
    rate_estimate: float
    std_error: float
    seed: int
    n_accidental: int = 0
    n_cross: int = 0
    n_same_rejected: int = 0

    @classmethod
    def from_counts(cls, n_pairs: int, counts: Sequence[int], seed: int) -> "CountRecord":
        coinc, accid, n_cross, cross_rej, singles, same_rej = (int(c) for c in counts)
        p = coinc / n_pairs
        return cls(
            n_pairs=n_pairs,
            n_coincident=coinc,
            n_cross_rejected=cross_rej,
            n_singles=singles,
            rate_estimate=p,
            std_error=math.sqrt(p * (1.0 - p) / n_pairs),
            seed=seed,
            n_accidental=accid,
            n_cross=n_cross,
            n_same_rejected=same_rej,
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MCSetup:
    """Fixed inputs of a simulation; one axis can be varied with :meth:`with_axis`."""

    cascade: CascadeSpec
    ifc: InterferometerConfig
    phase: PhaseParams
    modes: ModeCoefficients
    visibility: float = 1.0

    def with_axis(self, axis: str, value: float) -> "MCSetup":
        if axis in ("phi1", "phi2", "delta_t"):
            return replace(self, ifc=replace(self.ifc, **{axis: value}))
        if axis == "beta":
            return replace(self, phase=replace(self.phase, beta=value))
        raise ValueError(f"unknown axis {axis!r}; expected one of {MC_AXES}")

    def total_phase(self) -> float:
        ph = self.phase
        return analytic.total_phase(ph.delta_e, ph.delta_e_p, ph.beta, self.ifc.delta_t,
                                    self.ifc.phi1, self.ifc.phi2, ph.hbar).total

    def analytic_rate(self) -> float:
        """Expected coincidence probability per pair: eta1 eta2 (R0^GUP / R0) cos^2(Phi/2) / 4."""
        ph = self.phase
        r0 = analytic.mode_overlaps(self.modes)[0]
        rate = analytic.rate_gup(self.modes, ph.beta, ph.delta_e, ph.delta_e_p,
                                 self.ifc.delta_t, self.ifc.phi1, self.ifc.phi2, ph.hbar,
                                 self.visibility)
        return self.ifc.eta1 * self.ifc.eta2 * rate / r0


def _exp_cdf(x: float, scale: float) -> float:
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return -math.expm1(-x / scale)


@dataclass(frozen=True)
class _Thresholds:
    p_same: float
    p_cross: float
    same_hi: float
    sl_lo: float
    sl_hi: float
    ls_lo: float
    ls_hi: float
    eta1: float
    eta2: float

    def args(self) -> tuple:
        return (self.p_same, self.p_cross, self.same_hi, self.sl_lo, self.sl_hi,
                self.ls_lo, self.ls_hi, self.eta1, self.eta2)


def _thresholds(setup: MCSetup) -> _Thresholds:
    tau2 = setup.cascade.tau2
    if not tau2 > 0:
        raise ValueError("tau2 must be positive for the jitter model")
    ifc = setup.ifc
    dt, w = ifc.delta_t, ifc.window
    if not (dt > 0 and w > 0):
        raise ValueError("delta_t and window must be positive")
    if not (0 <= ifc.eta1 <= 1 and 0 <= ifc.eta2 <= 1):
        raise ValueError("detector efficiencies must lie in [0, 1]")
    r0 = analytic.mode_overlaps(setup.modes)[0]
    ratio = analytic.r0_gup(setup.modes, setup.phase.beta) / r0
    v = setup.visibility
    if not 0 <= v <= 1:
        raise ValueError("visibility must lie in [0, 1]")
    p_same = ratio * (1.0 + v * math.cos(setup.total_phase())) / 4.0
    p_cross = ratio / 4.0
    if p_same > 1.0:
        raise ValueError(f"R0^GUP/R0={ratio:.6g} is too large for a probability model")
    # jitter J ~ Exp(tau2) on the second photon; u < F(x) <=> J < x
    return _Thresholds(
        p_same=p_same,
        p_cross=p_cross,
        same_hi=_exp_cdf(w, tau2),                      # |J| <= W
        sl_lo=0.0, sl_hi=_exp_cdf(w - dt, tau2),        # dT + J <= W
        ls_lo=_exp_cdf(dt - w, tau2), ls_hi=_exp_cdf(dt + w, tau2),  # |J - dT| <= W
        eta1=ifc.eta1,
        eta2=ifc.eta2,
    )


def expected_probabilities(setup: MCSetup) -> dict:
    """Exact per-pair expectations of the model, from the exponential tail masses."""
    th = _thresholds(setup)
    e12 = th.eta1 * th.eta2
    pass_sl = th.sl_hi - th.sl_lo
    pass_ls = th.ls_hi - th.ls_lo
    same = 0.5 * th.same_hi * th.p_same
    cross = 0.25 * (pass_sl + pass_ls) * th.p_cross
    coincident = e12 * (same + cross)
    return {
        "coincident": coincident,
        "accidental": e12 * cross,
        "cross_pass_fraction": (pass_sl + pass_ls) / 2.0,
        "cross_rejected": 0.25 * ((1 - pass_sl) + (1 - pass_ls)),
        "accidental_fraction": cross / (same + cross) if same + cross > 0 else 0.0,
        "singles": (same + cross) * (th.eta1 * (1 - th.eta2) + th.eta2 * (1 - th.eta1)),
    }


def _shards(n: int, workers: int) -> list[tuple[int, int]]:
    size = -(-n // workers)
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def _as_phase(phase_params) -> PhaseParams:
    if isinstance(phase_params, PhaseParams):
        return phase_params
    return PhaseParams(*phase_params)


def run(
    setup: MCSetup,
    n_pairs: int,
    seed: int,
    *,
    workers: int = 1,
    backend: Optional[str] = None,
) -> CountRecord:
    """Simulate ``n_pairs`` pairs of ``setup``; see :func:`simulate_pairs`."""
    if isinstance(n_pairs, bool) or int(n_pairs) != n_pairs or n_pairs < 1:
        raise ValueError(f"n_pairs must be a positive integer, got {n_pairs!r}")
    n_pairs = int(n_pairs)
    seed = check_seed(seed)
    tally = _backend.get_tally(backend)
    args = _thresholds(setup).args()
    key = stream_key(seed)
    workers = max(1, min(int(workers), n_pairs))
    if workers == 1:
        counts = tally(key, 0, n_pairs, *args)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda s: tally(key, s[0], s[1], *args), _shards(n_pairs, workers))
            counts = sum(parts, np.zeros(6, dtype=np.int64))
    return CountRecord.from_counts(n_pairs, counts, seed)


def simulate_pairs(
    n_pairs: int,
    cascade: CascadeSpec,
    ifc: InterferometerConfig,
    phase_params,
    modes: ModeCoefficients,
    seed: int,
    *,
    visibility: float = 1.0,
    override: bool = False,
    workers: int = 1,
    backend: Optional[str] = None,
) -> CountRecord:
    """Tally coincidences, cross-path rejections and singles for ``n_pairs`` pairs.

    Raises ``ValueError`` when the configuration fails
    :func:`~franson_gup.core.validate_experiment` unless ``override`` is set.
    """
    if not override:
        report = validate_experiment(cascade, ifc)
        if not report.ok:
            raise ValueError("invalid experiment: " + "; ".join(v.message for v in report.violations))
    setup = MCSetup(cascade, ifc, _as_phase(phase_params), modes, visibility)
    return run(setup, n_pairs, seed, workers=workers, backend=backend)


def sample_events(setup: MCSetup, n_pairs: int, seed: int, start: int = 0) -> list[PairEvent]:
    """Pure-Python event list using the same draws as the tally kernels.

    Slow; meant for inspection and for cross-checking the kernels.
    """
    th = _thresholds(setup)
    key = stream_key(seed)
    tau1, tau2 = setup.cascade.tau1, setup.cascade.tau2
    dt = setup.ifc.delta_t
    events = []
    for i in range(start, start + n_pairs):
        base = i * SLOTS
        path = draw(key, base + SLOT_PATH) >> 62
        u = to_unit(draw(key, base + SLOT_JITTER))
        t0 = -tau1 * math.log1p(-to_unit(draw(key, base + SLOT_EMISSION)))
        jitter = -tau2 * math.log1p(-u)
        long_a = path in (2, 3)
        long_b = path in (1, 3)
        t_a = t0 + (dt if long_a else 0.0)
        t_b = t0 + jitter + (dt if long_b else 0.0)
        if path == 1:
            in_window, p = th.sl_lo <= u < th.sl_hi, th.p_cross
        elif path == 2:
            in_window, p = th.ls_lo <= u < th.ls_hi, th.p_cross
        else:
            in_window, p = u < th.same_hi, th.p_same
        accepted = in_window and to_unit(draw(key, base + SLOT_CHANNEL)) < p
        if accepted:
            detected = (to_unit(draw(key, base + SLOT_DET1)) < th.eta1,
                        to_unit(draw(key, base + SLOT_DET2)) < th.eta2)
        else:
            detected = (False, False)
        events.append(PairEvent(t0, PATHS[path], (t_a, t_b), detected,
                                detected[0] and detected[1]))
    return events


def tally_events(events: Iterable[PairEvent], window: float) -> np.ndarray:
    """Recount an event list into the kernel's six counters."""
    counts = np.zeros(6, dtype=np.int64)
    for ev in events:
        cross = ev.paths in ("SL", "LS")
        in_window = abs(ev.arrival[0] - ev.arrival[1]) <= window
        if cross:
            counts[2] += 1
            if not in_window:
                counts[3] += 1
        elif not in_window:
            counts[5] += 1
        if ev.coincident:
            counts[0] += 1
            counts[1] += cross
        elif ev.detected[0] != ev.detected[1]:
            counts[4] += 1
    return counts


def accidental_fraction(record: CountRecord) -> float:
    """Share of coincidences that came from distinguishable (cross-path) pairs."""
    if record.n_coincident == 0:
        return 0.0
    return record.n_accidental / record.n_coincident


def mc_records(
    setup: MCSetup,
    axis: str,
    values: Sequence[float],
    n_pairs: int,
    seed: int,
    *,
    workers: int = 1,
    backend: Optional[str] = None,
) -> tuple[np.ndarray, list[CountRecord]]:
    """One run per axis value, sorted ascending; point k uses ``derive_seed(seed, k)``."""
    if axis not in MC_AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {MC_AXES}")
    vals = np.sort(np.asarray(values, dtype=float))
    if vals.size == 0:
        raise ValueError("axis must contain at least one value")
    if np.any(np.diff(vals) == 0):
        raise ValueError("axis values must be distinct")
    seed = check_seed(seed)

    def one(k):
        return run(setup.with_axis(axis, float(vals[k])), n_pairs, derive_seed(seed, k),
                   backend=backend)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(vals.size)))
    else:
        records = [one(k) for k in range(vals.size)]
    return vals, records


def mc_spectrum(
    setup: MCSetup,
    axis: str,
    values: Sequence[float],
    n_pairs: int,
    seed: int,
    *,
    workers: int = 1,
    backend: Optional[str] = None,
) -> Spectrum:
    vals, records = mc_records(setup, axis, values, n_pairs, seed, workers=workers,
                               backend=backend)
    return Spectrum(
        axis,
        vals,
        np.array([r.rate_estimate for r in records]),
        np.array([r.std_error for r in records]),
    )


__all__ = [
    "CountRecord", "MCSetup", "PairEvent", "PhaseParams", "accidental_fraction",
    "expected_probabilities", "mc_records", "mc_spectrum", "run", "sample_events",
    "simulate_pairs", "tally_events", "derive_seed",
]
