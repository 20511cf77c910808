"""
Tests for the trap parameters and the scaled unit system.
"""

import math

import pytest

from physics.errors import ParameterValidationError, UnstableTrapError
from physics.fidelity import decay_penalty
from physics.trap_units import (
    PhysicalConstants,
    StateFrequencies,
    TrapParameters,
    derive_scaled_units,
    ell_frequency_ratio,
    polarizability_term_for_ratio,
    quartic_coefficient_for_k4,
    rydberg_frequency_ratio,
)


@pytest.fixture
def consts():
    return PhysicalConstants.calcium_40()


@pytest.fixture
def trap():
    return TrapParameters()


def test_scales_for_default_trap(trap, consts):
    units = derive_scaled_units(trap, consts)
    assert units.frequency_scale == pytest.approx(1.0046e5, rel=1e-3)
    assert units.length_scale == pytest.approx(7.008e-5, rel=1e-3)
    assert float(units.to_micrometers(1.0)) == pytest.approx(70.08, rel=1e-3)


def test_ell_frequency_ratio_near_150(trap, consts):
    assert ell_frequency_ratio(trap, consts) == pytest.approx(150.0, abs=1.0)


def test_gate_time_of_eight_bus_periods(trap, consts):
    units = derive_scaled_units(trap, consts)
    tau = 8 * 2 * math.pi / 150.0
    assert float(units.to_microseconds(tau)) == pytest.approx(3.7, rel=0.15)


def test_quartic_coefficient_round_trips_k4(trap, consts):
    beta4 = quartic_coefficient_for_k4(1.343, trap, consts)
    shaped = TrapParameters(
        rf_gradient=trap.rf_gradient,
        rf_frequency=trap.rf_frequency,
        quadratic_coefficient=trap.quadratic_coefficient,
        quartic_coefficient=beta4,
    )
    assert derive_scaled_units(shaped, consts).k4 == pytest.approx(1.343, rel=1e-12)


def test_quartic_coefficient_ignores_the_starting_beta4(trap, consts):
    other = TrapParameters(quadratic_coefficient=trap.quadratic_coefficient, quartic_coefficient=37.0)
    assert quartic_coefficient_for_k4(1.343, other, consts) == pytest.approx(
        quartic_coefficient_for_k4(1.343, trap, consts), rel=1e-12
    )
    with pytest.raises(ParameterValidationError):
        quartic_coefficient_for_k4(0.0, trap, consts)


def test_invalid_trap_is_rejected(consts):
    with pytest.raises(ParameterValidationError):
        derive_scaled_units(TrapParameters(quadratic_coefficient=2.09e3), consts)


def test_rydberg_ratio_and_inverse():
    assert rydberg_frequency_ratio(0.0) == 1.0
    ratio = 198.5 / 150.0
    assert rydberg_frequency_ratio(polarizability_term_for_ratio(ratio)) == pytest.approx(ratio)


def test_polarizability_term_at_or_below_minus_one_is_unstable():
    with pytest.raises(UnstableTrapError):
        rydberg_frequency_ratio(-1.0)


def test_state_frequencies_from_polarizability_term():
    freqs = StateFrequencies.from_polarizability_term(150.0, 3.0)
    assert freqs.omega_ryd == pytest.approx(300.0)
    assert freqs.validate() == []
    assert StateFrequencies(omega_ell=150.0, omega_ryd=100.0).validate()


def test_decay_penalty_defaults():
    assert decay_penalty(1) == pytest.approx(0.982, abs=1e-3)
    assert decay_penalty(4) == pytest.approx(0.930, abs=2e-3)
    assert decay_penalty(0) == 1.0


def test_decay_penalty_rejects_bad_inputs():
    with pytest.raises(ParameterValidationError):
        decay_penalty(-1)
    with pytest.raises(ParameterValidationError):
        decay_penalty(1, lifetime=0.0)
