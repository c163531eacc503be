from pathlib import Path

import pytest

from franson_gup.core import CascadeSpec, InterferometerConfig, ModeCoefficients
from franson_gup.montecarlo import MCSetup, PhaseParams

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def cascade():
    # oscillator levels 2 -> 1 -> 0 with omega = 1
    return CascadeSpec(2.5, 1.5, 0.5, tau1=100.0, tau2=0.1, tau3=1000.0)


@pytest.fixture
def ifc():
    return InterferometerConfig(delta_t=10.0, window=1.0)


@pytest.fixture
def unit_modes():
    return ModeCoefficients.single_mode()


@pytest.fixture
def ideal_setup(cascade, ifc, unit_modes):
    """Default validated configuration with Phi shifted to zero through phi1."""
    setup = MCSetup(cascade, ifc, PhaseParams(2.0, 9.0, 0.0), unit_modes)
    return setup.with_axis("phi1", -setup.total_phase())


def phase_to(setup, target):
    """Return ``setup`` with phi1 chosen so the total phase equals ``target``."""
    current = setup.total_phase() - setup.ifc.phi1
    return setup.with_axis("phi1", target - current)
