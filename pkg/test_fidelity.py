"""
Tests for the Bogoliubov mapping and the thermal gate fidelity.
"""

import itertools

import numpy as np
import pytest

from physics.equilibrium import solve_equilibrium
from physics.errors import DimensionMismatchError, ParameterValidationError
from physics.fidelity import (
    DuschinskyMap,
    GateLayout,
    ThermalState,
    bare_frame_displacements,
    duschinsky_map,
    gate_fidelity,
    spin_configurations,
    temperature_from_occupation,
    thermal_state,
)
from physics.gate_dynamics import DisplacementCoefficients, PhaseMatrix
from physics.normal_modes import ElectronicAssignment, build_hessian, diagonalize
from physics.trap_units import StateFrequencies

ONE_PAIR = GateLayout(pairs=[(0, 1)], subcrystals=[[0, 1]], bus_modes=[0])
TWO_PAIRS = GateLayout(pairs=[(0, 1), (2, 3)], subcrystals=[[0, 1], [2, 3]], bus_modes=[0, 1])


def pair_phases(size, pairs, value):
    matrix = np.zeros((size, size))
    for m, n in pairs:
        matrix[m, n] = matrix[n, m] = value
    return PhaseMatrix(matrix=matrix, t_end=1.0)


def test_perfect_gate_has_unit_fidelity():
    thermal = thermal_state([1.0, 1.2], 0, 3.25)
    phases = pair_phases(4, TWO_PAIRS.pairs, np.pi / 8)
    assert gate_fidelity(np.zeros((4, 2)), phases, thermal, TWO_PAIRS) == pytest.approx(1.0, abs=1e-12)


def test_missing_phase_halves_fidelity_per_pair():
    ground = ThermalState.ground([1.0, 1.2])
    one = gate_fidelity(np.zeros((2, 2)), pair_phases(2, [], 0.0), ground, ONE_PAIR)
    two = gate_fidelity(np.zeros((4, 2)), pair_phases(4, [], 0.0), ground, TWO_PAIRS)
    assert one == pytest.approx(0.5, abs=1e-12)
    assert two == pytest.approx(0.25, abs=1e-12)


def test_ground_state_fidelity_matches_coherent_overlaps():
    rng = np.random.default_rng(7)
    c_g = 0.2 * (rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)))
    phases = pair_phases(2, ONE_PAIR.pairs, 0.37)

    configs = list(itertools.product((1, -1), repeat=2))
    total = 0.0 + 0.0j
    for sj, sk in itertools.product(configs, repeat=2):
        beta_j = np.array(sj) @ c_g
        beta_k = np.array(sk) @ c_g
        chi_j = 2 * 0.37 * sj[0] * sj[1] - np.pi / 4 * sj[0] * sj[1]
        chi_k = 2 * 0.37 * sk[0] * sk[1] - np.pi / 4 * sk[0] * sk[1]
        overlap = np.exp(np.sum(beta_j * beta_k.conj() - 0.5 * abs(beta_j) ** 2 - 0.5 * abs(beta_k) ** 2))
        total += np.exp(1j * (chi_j - chi_k)) * overlap
    expected = (total / 16).real

    result = gate_fidelity(c_g, phases, ThermalState.ground([1.0, 1.1, 1.3]), ONE_PAIR)
    assert result == pytest.approx(expected, abs=1e-12)


def test_heat_does_not_matter_without_displacement():
    phases = pair_phases(2, ONE_PAIR.pairs, 0.3)
    cold = gate_fidelity(np.zeros((2, 1)), phases, ThermalState.ground([1.0]), ONE_PAIR)
    hot = gate_fidelity(np.zeros((2, 1)), phases, thermal_state([1.0], 0, 10.0), ONE_PAIR)
    assert hot == pytest.approx(cold)


def test_reference_mode_occupation():
    thermal = thermal_state([150.0, 160.0, 170.0], 0, 3.25)
    assert thermal.occupations[0] == pytest.approx(3.25)
    assert np.all(np.diff(thermal.occupations) < 0)
    assert temperature_from_occupation(3.25) == pytest.approx(np.log(1 + 1 / 3.25))
    with pytest.raises(ParameterValidationError):
        thermal_state([150.0], 1, 3.25)
    with pytest.raises(ParameterValidationError):
        temperature_from_occupation(0.0)


def test_fourfold_frequency_bogoliubov_blocks():
    mapping = DuschinskyMap(T=np.eye(1), bare_frequencies=np.array([1.0]), shaped_frequencies=np.array([4.0]))
    assert mapping.T_plus[0, 0] == pytest.approx(2.5)
    assert mapping.T_minus[0, 0] == pytest.approx(1.5)
    assert mapping.commutation_error() == pytest.approx(0.0, abs=1e-15)


def test_long_chain_mapping_preserves_commutators():
    chain = solve_equilibrium(100, 1.343)
    freqs = StateFrequencies(omega_ell=150.0, omega_ryd=198.5)
    bare = diagonalize(build_hessian(chain, ElectronicAssignment.all_ell(100, freqs)))
    shaped = diagonalize(build_hessian(chain, ElectronicAssignment.from_rydberg_ions(100, [44, 47, 52, 55], freqs)))
    mapping = duschinsky_map(bare, shaped)
    assert mapping.orthogonality_error() < 1e-10
    assert mapping.commutation_error() < 1e-10


def test_identity_mapping_keeps_displacements():
    modes = diagonalize(np.diag([4.0, 9.0]))
    mapping = duschinsky_map(modes, modes)
    coeffs = DisplacementCoefficients(matrix=np.array([[0.1 + 0.2j, -0.3j], [0.0, 0.05]]), t_end=1.0)
    assert np.allclose(bare_frame_displacements(coeffs, mapping), coeffs.matrix)


def test_mismatched_shapes_raise():
    small = diagonalize(np.diag([1.0]))
    large = diagonalize(np.diag([1.0, 2.0]))
    with pytest.raises(DimensionMismatchError):
        duschinsky_map(small, large)
    with pytest.raises(DimensionMismatchError):
        gate_fidelity(np.zeros((2, 3)), pair_phases(2, [], 0.0), ThermalState.ground([1.0]), ONE_PAIR)


def test_layout_validation():
    overlapping = GateLayout(pairs=[(0, 1), (1, 2)], subcrystals=[[0, 1], [1, 2]], bus_modes=[0, 1])
    assert overlapping.validate()
    outside = GateLayout(pairs=[(0, 1)], subcrystals=[[2, 3]], bus_modes=[0])
    with pytest.raises(ParameterValidationError):
        gate_fidelity(np.zeros((4, 1)), pair_phases(4, [], 0.0), ThermalState.ground([1.0]), outside)


def test_spin_configurations_order():
    configs = spin_configurations(2)
    assert [c.spins for c in configs] == [(1, 1), (1, -1), (-1, 1), (-1, -1)]


def test_duplicate_bus_modes_are_rejected():
    shared = GateLayout(pairs=[(0, 1), (2, 3)], subcrystals=[[0, 1], [2, 3]], bus_modes=[5, 5])
    assert "gate pairs must use distinct bus modes" in shared.validate()
    with pytest.raises(ParameterValidationError):
        gate_fidelity(np.zeros((4, 6)), pair_phases(4, shared.pairs, np.pi / 8), ThermalState.ground(np.ones(6)), shared)


@pytest.fixture(scope="module")
def eight_ion_modes():
    chain = solve_equilibrium(8, 1.343)
    freqs = StateFrequencies(omega_ell=150.0, omega_ryd=198.5)
    bare = diagonalize(build_hessian(chain, ElectronicAssignment.all_ell(8, freqs)))
    shaped = diagonalize(build_hessian(chain, ElectronicAssignment.from_rydberg_ions(8, [1, 6], freqs)))
    return bare, shaped


def shaped_residuals(seed=11, scale=0.05):
    rng = np.random.default_rng(seed)
    matrix = np.zeros((8, 8), dtype=complex)
    matrix[[3, 4], :] = scale * (rng.normal(size=(2, 8)) + 1j * rng.normal(size=(2, 8)))
    return DisplacementCoefficients(matrix=matrix, t_end=1.0)


EIGHT_ION_PAIR = GateLayout(pairs=[(3, 4)], subcrystals=[[2, 3, 4, 5]], bus_modes=[7])


def test_fidelity_ignores_bare_eigenvector_signs(eight_ion_modes):
    bare, shaped = eight_ion_modes
    phases = pair_phases(8, EIGHT_ION_PAIR.pairs, 0.95 * np.pi / 8)
    thermal = thermal_state(bare.frequencies, 7, 3.25)
    reference = gate_fidelity(
        bare_frame_displacements(shaped_residuals(), duschinsky_map(bare, shaped)), phases, thermal, EIGHT_ION_PAIR
    )
    assert reference < 0.999
    for mode in (0, 3, 7):
        flipped = bare.with_flipped_mode(mode)
        value = gate_fidelity(
            bare_frame_displacements(shaped_residuals(), duschinsky_map(flipped, shaped)),
            phases,
            thermal,
            EIGHT_ION_PAIR,
        )
        assert value == pytest.approx(reference, abs=1e-12)


def test_unchanged_modes_reproduce_the_bare_frame_fidelity(eight_ion_modes):
    bare, _ = eight_ion_modes
    residuals = shaped_residuals(seed=3)
    phases = pair_phases(8, EIGHT_ION_PAIR.pairs, np.pi / 8)
    thermal = thermal_state(bare.frequencies, 7, 3.25)
    mapped = bare_frame_displacements(residuals, duschinsky_map(bare, bare))
    direct = gate_fidelity(residuals.matrix, phases, thermal, EIGHT_ION_PAIR)
    assert gate_fidelity(mapped, phases, thermal, EIGHT_ION_PAIR) == pytest.approx(direct, abs=1e-12)


def test_fidelity_falls_as_the_modes_heat_up(eight_ion_modes):
    bare, shaped = eight_ion_modes
    c_g = bare_frame_displacements(shaped_residuals(), duschinsky_map(bare, shaped))
    phases = pair_phases(8, EIGHT_ION_PAIR.pairs, np.pi / 8)
    values = [
        gate_fidelity(c_g, phases, thermal_state(bare.frequencies, 7, n_bar), EIGHT_ION_PAIR)
        for n_bar in (0.5, 3.25, 10.0)
    ]
    assert values[0] > values[1] > values[2]
