"""
Tests for microwave dressing, the laser π-pulse and the adiabatic ramp.
"""

import math

import numpy as np
import pytest

from config.scenario import DressingConfig
from physics.errors import NoZeroCrossingError, ParameterValidationError, StepControlError
from physics.rydberg_excitation import (
    DressedSystem,
    adiabatic_ramp,
    dressed_analysis,
    dressed_polarizability,
    evolve_dressed_model,
    evolve_three_level,
    laser_rabi_for_dressed_coupling,
    polarizability_for_mixing,
    polarizability_zero_mixing,
    ramp_detuning,
    ramp_hold_time,
    rydberg_polarizabilities,
    trajectory_frame,
    transfer_time,
)

MHZ = 2 * math.pi * 1e6


@pytest.fixture(scope="module")
def dressing():
    return DressingConfig()


@pytest.fixture(scope="module")
def driven(dressing):
    system = dressing.system()
    return system.with_laser(laser_rabi_for_dressed_coupling(system, dressing.omega_minus))


@pytest.fixture(scope="module")
def pi_pulse(driven, dressing):
    return evolve_three_level(driven, dressing.pi_pulse_duration, samples=201)


@pytest.fixture(scope="module")
def fast_ramp(dressing):
    return adiabatic_ramp(dressing.system(), dressing.sweep_rate, 20e-9, samples=201)


def test_default_dressing_mixing(dressing):
    states = dressed_analysis(dressing.system())
    assert states.c_minus == pytest.approx(-0.680, abs=1e-3)
    assert states.c_minus * states.c_plus == pytest.approx(-1.0)
    assert states.splitting / MHZ == pytest.approx(430.03, abs=0.01)
    assert abs(states.e_minus) / MHZ < 1e-3


def test_dressed_vectors_are_orthonormal(dressing):
    vectors = dressed_analysis(dressing.system()).vectors()
    assert np.allclose(vectors.T @ vectors, np.eye(2))


def test_laser_rabi_reproduces_requested_coupling(driven, dressing):
    states = dressed_analysis(driven)
    assert states.omega_minus == pytest.approx(dressing.omega_minus)
    assert driven.omega_l / MHZ == pytest.approx(1.778, abs=1e-3)


def test_mixing_nulls_polarizability(driven, dressing):
    p_np, p_ns = rydberg_polarizabilities(dressing.principal_number)
    mixing = polarizability_zero_mixing(p_np, p_ns)
    assert mixing == pytest.approx(0.68)
    assert polarizability_for_mixing(mixing, p_np, p_ns) == pytest.approx(0.0, abs=1e-9 * abs(p_np))
    _, p_minus = dressed_polarizability(dressed_analysis(driven), p_np, p_ns)
    assert abs(p_minus) < 1e-3 * abs(p_np)


def test_equal_sign_polarizabilities_cannot_cancel():
    with pytest.raises(NoZeroCrossingError):
        polarizability_zero_mixing(-1.0, -0.5)


def test_pi_pulse_transfers_to_dressed_minus(pi_pulse):
    dressed = pi_pulse.dressed_populations()
    assert dressed[-1, 0] >= 0.99
    assert pi_pulse.norm_drift < 1e-6


def test_reduced_model_tracks_full_evolution(pi_pulse, driven):
    full_minus = pi_pulse.dressed_populations()[:, 0]
    reduced = np.abs(evolve_dressed_model(driven, pi_pulse.times)) ** 2
    two_level = np.abs(evolve_dressed_model(driven, pi_pulse.times, include_plus=False)) ** 2
    assert np.max(np.abs(reduced[:, 1] - full_minus)) < 1e-4
    assert np.max(np.abs(two_level[:, 1] - full_minus)) < 0.02
    assert np.allclose(two_level.sum(axis=1), 1.0)


def test_coarse_steps_are_rejected(driven):
    with pytest.raises(StepControlError):
        evolve_three_level(driven, 1e-7, steps_per_period=49)


def test_ramp_hold_time(dressing):
    hold = ramp_hold_time(dressing.system(), dressing.sweep_rate, dressing.ramp_cutoff)
    assert hold * 1e9 == pytest.approx(13.4, abs=0.1)
    detuning = ramp_detuning(dressing.system(), dressing.sweep_rate, dressing.ramp_cutoff)
    system = dressing.system()
    assert detuning(0.0) == pytest.approx(system.delta_s)
    assert detuning(2 * hold) - system.delta_p == pytest.approx(dressing.ramp_cutoff * system.omega_mw)
    assert ramp_hold_time(system, 0.0) == math.inf


def test_fast_ramp_reaches_p_state_by_hold(fast_ramp, dressing):
    hold = ramp_hold_time(dressing.system(), dressing.sweep_rate, dressing.ramp_cutoff)
    p_population = np.interp(hold, fast_ramp.times, fast_ramp.populations[:, 1])
    assert p_population >= 0.99
    reached = transfer_time(fast_ramp)
    assert reached is not None
    assert 5e-9 < reached < hold
    assert fast_ramp.norm_drift < 1e-6


def test_ramp_transfer_time_within_fifteen_nanoseconds(fast_ramp):
    reached = transfer_time(fast_ramp)
    assert reached * 1e9 < 15.0
    assert reached * 1e9 == pytest.approx(7.2, abs=0.3)


def test_halved_sweep_rate_stays_adiabatic_but_is_slower(fast_ramp, dressing):
    slow = adiabatic_ramp(dressing.system(), 0.5 * dressing.sweep_rate, 30e-9, samples=301)
    assert slow.populations[-1, 1] >= 0.99
    assert transfer_time(slow) > transfer_time(fast_ramp)
    assert slow.norm_drift < 1e-6


def test_ramp_starts_in_dressed_minus(fast_ramp):
    dressed = fast_ramp.dressed_populations()
    assert dressed[0, 0] == pytest.approx(1.0)


def test_ramp_needs_laser_off(driven):
    with pytest.raises(ParameterValidationError):
        adiabatic_ramp(driven, 1e8, 1e-9)


def test_transfer_time_edges():
    system = DressedSystem(delta_s=0.0, delta_p=2 * MHZ, omega_mw=10 * MHZ)
    dark = evolve_three_level(system, 1e-7, samples=11)
    assert transfer_time(dark) is None
    assert transfer_time(dark, level=0) == 0.0


def test_trajectory_frame_columns(pi_pulse):
    frame = trajectory_frame(pi_pulse)
    assert list(frame.columns) == ["t_ns", "pop_D", "pop_P", "pop_S", "pop_minus", "pop_plus"]
    assert len(frame) == 201
