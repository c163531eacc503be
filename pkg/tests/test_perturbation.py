import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from franson_gup.perturbation import (
    HarmonicOscillator, InfiniteWell, LevelMap, cascade_deltas, momentum_matrix,
    perturbation_energy, perturbation_energy_oracle, unperturbed_energy,
)

HO = HarmonicOscillator(1.0, 1.0)
WELL = InfiniteWell(1.0, math.pi)


@pytest.mark.parametrize("system, n, expected", [
    (HO, 0, 0.5),
    (WELL, 1, 0.5),
    (HarmonicOscillator(1.0, 2.0), 3, 7.0),
])
def test_unperturbed_energy(system, n, expected):
    assert unperturbed_energy(system, n) == pytest.approx(expected, rel=1e-15)


def test_well_has_no_level_zero():
    with pytest.raises(ValueError):
        unperturbed_energy(WELL, 0)


def _p4_diagonal_200(n, mass=1.0, omega=1.0):
    # p^4 built from ladder operators in a 200-state number basis
    p = momentum_matrix(200, mass, omega)
    return float((np.linalg.matrix_power(p, 4))[n, n].real) / mass


def test_oscillator_oracle_values():
    # (1/4)(6n^2 + 6n + 3)
    assert _p4_diagonal_200(0) == pytest.approx(0.75, rel=1e-12)
    assert _p4_diagonal_200(2) == pytest.approx(9.75, rel=1e-12)
    assert perturbation_energy(HO, 0) == 0.75
    assert perturbation_energy(HO, 2) == 9.75
    assert perturbation_energy(HO, 1) == 3.75


def test_oracle_examples():
    assert perturbation_energy_oracle(HO, 0, basis_size=50) == pytest.approx(0.75, abs=1e-12)
    assert perturbation_energy_oracle(HO, 1, basis_size=50) == pytest.approx(3.75, rel=1e-12)
    assert perturbation_energy_oracle(WELL, 1) == pytest.approx(1.0, rel=1e-10)
    assert perturbation_energy_oracle(WELL, 2) == pytest.approx(16.0, rel=1e-10)


def test_oracle_refuses_small_basis():
    with pytest.raises(ValueError, match="too small"):
        perturbation_energy_oracle(HO, 5, basis_size=10)


def test_unsupported_deformation():
    with pytest.raises(NotImplementedError):
        perturbation_energy(HO, 1, deformation="linear")


def test_momentum_matrix_is_hermitian():
    p = momentum_matrix(12, 1.3, 0.4)
    assert np.allclose(p, p.conj().T)


@pytest.mark.parametrize("system", [HO, HarmonicOscillator(2.5, 0.3), WELL, InfiniteWell(0.7, 2.2)])
def test_closed_form_matches_oracle(system):
    for n in range(system.ground_index, system.ground_index + 12):
        exact = perturbation_energy(system, n)
        oracle = perturbation_energy_oracle(system, n, basis_size=n + 24)
        assert abs(exact - oracle) / exact <= 1e-10


def test_oscillator_shift_increases_with_n():
    values = [perturbation_energy(HO, n) for n in range(30)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_well_shift_scales_as_n4():
    base = perturbation_energy(WELL, 1)
    for n in range(1, 21):
        assert perturbation_energy(WELL, n) == pytest.approx(base * n**4, rel=1e-12)


factor = st.floats(0.05, 20.0)


@settings(max_examples=100, deadline=None)
@given(k=factor, n=st.integers(0, 15))
def test_oscillator_scales_as_omega_squared(k, n):
    a = perturbation_energy(HarmonicOscillator(1.3, 0.8), n)
    b = perturbation_energy(HarmonicOscillator(1.3, 0.8 * k), n)
    assert b == pytest.approx(a * k**2, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(k=factor, n=st.integers(1, 15))
def test_well_scales_as_inverse_width4(k, n):
    a = perturbation_energy(InfiniteWell(0.9, 1.7), n)
    b = perturbation_energy(InfiniteWell(0.9, 1.7 * k), n)
    assert b == pytest.approx(a / k**4, rel=1e-12)


def test_cascade_deltas_examples():
    assert cascade_deltas(HO, LevelMap(2, 1, 0)) == (2.0, 9.0)
    de, de_p = cascade_deltas(WELL, LevelMap(3, 2, 1))
    assert de == pytest.approx(4.0, rel=1e-14)
    assert de_p == pytest.approx(80.0, rel=1e-14)


def test_cascade_deltas_unperturbed_part_matches_levels():
    de, _ = cascade_deltas(HO, LevelMap(5, 3, 1))
    assert de == unperturbed_energy(HO, 5) - unperturbed_energy(HO, 1)


@pytest.mark.parametrize("levels", [(2, 2, 2), (1, 2, 0), (2, 1, 1)])
def test_invalid_level_maps(levels):
    with pytest.raises(ValueError):
        cascade_deltas(HO, LevelMap(*levels))


def test_level_map_respects_ground_index():
    with pytest.raises(ValueError, match="ground index"):
        cascade_deltas(WELL, LevelMap(2, 1, 0))
