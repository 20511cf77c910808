"""
Tests for the state-dependent transverse modes.
"""

import numpy as np
import pytest

from physics.equilibrium import solve_equilibrium
from physics.errors import DimensionMismatchError, ParameterValidationError, StructuralInstabilityError
from physics.normal_modes import (
    ElectronicAssignment,
    assign_bus_modes,
    bus_mode,
    build_hessian,
    diagonalize,
    dominant_modes,
    frequency_frame,
    localization_frame,
    localization_weights,
    localized_mode_analysis,
    mode_frame,
    subcrystals_from_rydberg_ions,
    truncated_subcrystal_modes,
    truncation_report,
)
from physics.trap_units import StateFrequencies

K4 = 1.343
FREQS = StateFrequencies(omega_ell=150.0, omega_ryd=198.5)


@pytest.fixture(scope="module")
def short_chain():
    return solve_equilibrium(12, K4)


@pytest.fixture(scope="module")
def shaped_modes(short_chain):
    assignment = ElectronicAssignment.from_rydberg_ions(12, [2, 9], FREQS)
    return diagonalize(build_hessian(short_chain, assignment))


def test_long_chain_modes_are_orthonormal():
    chain = solve_equilibrium(100, K4)
    modes = diagonalize(build_hessian(chain, ElectronicAssignment.all_ell(100, FREQS)))
    assert modes.orthonormality_error() < 1e-10
    assert np.max(modes.residuals()) < 1e-8
    assert np.all(np.diff(modes.frequencies) >= 0)


def test_largest_entry_of_each_mode_is_positive(shaped_modes):
    vectors = shaped_modes.vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    assert np.all(vectors[pivots, np.arange(vectors.shape[1])] > 0)


def test_amplitude_matrix_has_modes_as_rows(shaped_modes):
    amplitudes = shaped_modes.amplitude_matrix()
    assert amplitudes.shape == (12, 12)
    assert np.allclose(np.sum(amplitudes**2, axis=1), 1.0)


def test_rydberg_ion_raises_its_own_frequency(short_chain):
    bare = build_hessian(short_chain, ElectronicAssignment.all_ell(12, FREQS))
    shaped = build_hessian(short_chain, ElectronicAssignment.from_rydberg_ions(12, [2, 9], FREQS))
    delta = shaped - bare
    expected = np.zeros(12)
    expected[[2, 9]] = FREQS.omega_ryd**2 - FREQS.omega_ell**2
    assert np.allclose(delta, np.diag(expected))


def test_detuned_ion_localizes_the_top_mode():
    chain = solve_equilibrium(3, K4)
    weights = []
    for omega_ryd in (150.0, 150.5, 152.0, 160.0, 200.0):
        freqs = StateFrequencies(omega_ell=150.0, omega_ryd=omega_ryd)
        modes = diagonalize(build_hessian(chain, ElectronicAssignment.from_rydberg_ions(3, [0], freqs)))
        weights.append(localization_weights(modes, [0])[-1])
    assert np.all(np.diff(weights) > 0)
    assert weights[-1] > 0.99


def test_subcrystal_weights_sum_to_its_size(shaped_modes):
    host = list(range(3, 9))
    assert localization_weights(shaped_modes, host).sum() == pytest.approx(len(host))


def test_localized_modes_are_sorted_and_above_threshold(shaped_modes):
    selected, weights = localized_mode_analysis(shaped_modes, list(range(3, 9)), weight_threshold=0.5)
    assert np.all(weights >= 0.5)
    assert list(shaped_modes.frequencies[selected]) == sorted(shaped_modes.frequencies[selected])


def test_bus_mode_is_highest_dominant_mode(shaped_modes):
    host = list(range(3, 9))
    dominant = dominant_modes(shaped_modes, host)
    assert len(dominant) == len(host)
    assert bus_mode(shaped_modes, host) == dominant[-1]
    assert shaped_modes.frequencies[dominant[-1]] == max(shaped_modes.frequencies[dominant])


def test_mirror_hosts_get_distinct_bus_modes(short_chain):
    assignment = ElectronicAssignment.from_rydberg_ions(12, [1, 4, 7, 10], FREQS)
    modes = diagonalize(build_hessian(short_chain, assignment))
    hosts = [[2, 3], [8, 9]]
    union = dominant_modes(modes, [2, 3, 8, 9])
    assigned = assign_bus_modes(modes, hosts, union)
    assert len(set(assigned)) == 2
    assert set(assigned) <= set(union)
    assert bus_mode(modes, hosts[0]) in assigned
    with pytest.raises(ParameterValidationError):
        assign_bus_modes(modes, hosts, union[:1])


def test_two_rydberg_host_localization_on_long_chain():
    chain = solve_equilibrium(100, K4)
    modes = diagonalize(build_hessian(chain, ElectronicAssignment.from_rydberg_ions(100, [44, 55], FREQS)))
    (host,) = subcrystals_from_rydberg_ions(100, [44, 55])
    assert host == list(range(45, 55))
    selected, _ = localized_mode_analysis(modes, host, weight_threshold=0.95)
    # Coupling through the Rydberg ions caps how many host modes pass 0.95
    assert len(selected) == 5
    assert len(localized_mode_analysis(modes, host, weight_threshold=0.9)[0]) == 7
    dominant = dominant_modes(modes, host)
    assert np.all(localization_weights(modes, host)[dominant] > 0.7)


def test_truncation_report_pairs_every_subcrystal_mode(short_chain, shaped_modes):
    host = list(range(3, 9))
    assignment = ElectronicAssignment.from_rydberg_ions(12, [2, 9], FREQS)
    truncated = truncated_subcrystal_modes(short_chain, assignment, host)
    report = truncation_report(shaped_modes, truncated, host)
    assert list(report.columns) == [
        "mode_index",
        "full_omega_over_omegas",
        "truncated_omega_over_omegas",
        "relative_discrepancy",
    ]
    assert len(report) == len(host)
    assert (report["relative_discrepancy"] >= 0).all()
    assert report["mode_index"].between(1, 12).all()


def test_truncation_needs_contiguous_host(short_chain):
    assignment = ElectronicAssignment.all_ell(12, FREQS)
    with pytest.raises(ParameterValidationError):
        truncated_subcrystal_modes(short_chain, assignment, [3, 5])


def test_subcrystals_between_rydberg_ions():
    assert subcrystals_from_rydberg_ions(100, [44, 55]) == [list(range(45, 55))]
    assert subcrystals_from_rydberg_ions(100, [44, 47, 52, 55]) == [
        [45, 46],
        [48, 49, 50, 51],
        [53, 54],
    ]
    assert subcrystals_from_rydberg_ions(100, [10, 11]) == []


def test_negative_curvature_is_structural_instability():
    with pytest.raises(StructuralInstabilityError) as excinfo:
        diagonalize(np.diag([-1.0, 1.0]))
    assert excinfo.value.mode == 0


def test_shape_errors():
    with pytest.raises(DimensionMismatchError):
        diagonalize(np.ones((2, 3)))
    with pytest.raises(DimensionMismatchError):
        build_hessian(solve_equilibrium(3, K4), ElectronicAssignment.all_ell(4, FREQS))
    with pytest.raises(ParameterValidationError):
        ElectronicAssignment.from_rydberg_ions(5, [5], FREQS)


def test_frames_are_one_based(shaped_modes):
    modes_table = mode_frame(shaped_modes)
    assert list(modes_table.columns) == ["mode_index", "ion_index", "amplitude"]
    assert len(modes_table) == 144
    first = modes_table.iloc[1]
    assert (first["mode_index"], first["ion_index"]) == (1, 2)
    assert first["amplitude"] == pytest.approx(shaped_modes.vectors[1, 0])

    assert list(frequency_frame(shaped_modes).columns) == ["mode_index", "omega_over_omegas"]
    table = localization_frame(shaped_modes, {"4-9": range(3, 9)})
    assert "weight_4-9" in table.columns
