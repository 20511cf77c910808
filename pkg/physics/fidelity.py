"""
Thermal gate fidelity across a sudden change of the phonon modes.

The qubits start in |+⟩ on every gate ion with the phonons thermal in the bare
(all-ELL) modes. Rydberg excitation is fast compared to the phonons, so the gate
runs in the shaped modes from the same phonon state. Displacements produced in
the shaped frame are mapped back onto bare-mode operators with the Duschinsky
matrix T and its Bogoliubov blocks T_± before the thermal average is taken.
"""

from dataclasses import dataclass
from itertools import product
from typing import List, Sequence, Tuple

import numpy as np
import structlog

from .errors import ConsistencyError, DimensionMismatchError, ParameterValidationError
from .gate_dynamics import DisplacementCoefficients, PhaseMatrix
from .normal_modes import ModeDecomposition
from .trap_units import PhysicalConstants, ScaledUnits

logger = structlog.get_logger(__name__)

DEFAULT_EXCITED_DURATION = 4.9e-6
DEFAULT_RYDBERG_LIFETIME = 270e-6
IDEAL_PAIR_PHASE = np.pi / 4


@dataclass
class DuschinskyMap:
    """
    Q_shaped = T Q_bare with rows indexing shaped modes and columns bare modes.

    R = L_e⁻¹TL_g and S = P_e⁻¹TP_g carry the frequency weighting; the shaped
    annihilators are b = ½(T_+ a + T_− a†) with T_± = R ± S.
    """

    T: np.ndarray
    bare_frequencies: np.ndarray
    shaped_frequencies: np.ndarray

    @property
    def R(self) -> np.ndarray:
        return self.T * np.sqrt(self.shaped_frequencies[:, None] / self.bare_frequencies[None, :])

    @property
    def S(self) -> np.ndarray:
        return self.T * np.sqrt(self.bare_frequencies[None, :] / self.shaped_frequencies[:, None])

    @property
    def T_plus(self) -> np.ndarray:
        return self.R + self.S

    @property
    def T_minus(self) -> np.ndarray:
        return self.R - self.S

    def orthogonality_error(self) -> float:
        return float(np.max(np.abs(self.T @ self.T.T - np.eye(self.T.shape[0]))))

    def commutation_error(self) -> float:
        """Deviation of ¼(T_+T_+ᵀ − T_−T_−ᵀ) from the identity"""
        plus, minus = self.T_plus, self.T_minus
        bracket = 0.25 * (plus @ plus.T - minus @ minus.T)
        return float(np.max(np.abs(bracket - np.eye(bracket.shape[0]))))


def duschinsky_map(bare: ModeDecomposition, shaped: ModeDecomposition) -> DuschinskyMap:
    if bare.vectors.shape != shaped.vectors.shape:
        raise DimensionMismatchError(
            "Bare and shaped decompositions differ in size",
            details={"bare": list(bare.vectors.shape), "shaped": list(shaped.vectors.shape)},
        )
    return DuschinskyMap(
        T=shaped.vectors.T @ bare.vectors,
        bare_frequencies=bare.frequencies.copy(),
        shaped_frequencies=shaped.frequencies.copy(),
    )


def bare_frame_displacements(shaped_coeffs: DisplacementCoefficients, mapping: DuschinskyMap) -> np.ndarray:
    """C_g = Re(C_e)·R + i·Im(C_e)·S, one row per ion and one column per bare mode"""
    c_e = np.asarray(shaped_coeffs.matrix)
    if c_e.shape[1] != mapping.T.shape[0]:
        raise DimensionMismatchError(
            "Displacement columns do not match the shaped modes",
            details={"columns": int(c_e.shape[1]), "modes": int(mapping.T.shape[0])},
        )
    return c_e.real @ mapping.R + 1j * (c_e.imag @ mapping.S)


@dataclass
class ThermalState:
    """Bare-mode frequencies with γ_p = ħω̃_p/(k_B T); γ = inf is the ground state"""

    frequencies: np.ndarray
    gammas: np.ndarray

    @classmethod
    def ground(cls, frequencies) -> "ThermalState":
        frequencies = np.asarray(frequencies, dtype=float)
        return cls(frequencies=frequencies, gammas=np.full(frequencies.shape, np.inf))

    @property
    def occupations(self) -> np.ndarray:
        return 1.0 / np.expm1(self.gammas)

    @property
    def coth_half(self) -> np.ndarray:
        return 1.0 / np.tanh(0.5 * self.gammas)

    def validate(self) -> List[str]:
        issues = []
        if self.frequencies.shape != self.gammas.shape:
            issues.append("one temperature factor per mode is required")
        if np.any(~(self.gammas > 0)):
            issues.append("temperature factors must be positive")
        return issues


def temperature_from_occupation(n_bar: float) -> float:
    """γ = ln(1 + 1/n̄)"""
    if not n_bar > 0:
        raise ParameterValidationError("Mean occupation must be positive", details={"n_bar": n_bar})
    return float(np.log1p(1.0 / n_bar))


def physical_temperature(gamma: float, omega_scaled: float, units: ScaledUnits, consts: PhysicalConstants) -> float:
    """Temperature in kelvin for a mode of scaled frequency ``omega_scaled``"""
    omega = float(units.to_rad_per_second(omega_scaled))
    return consts.reduced_planck * omega / (consts.boltzmann * gamma)


def thermal_state(bare_frequencies, reference_index: int, n_bar: float) -> ThermalState:
    """Common temperature fixed by n̄ on one reference bare mode"""
    frequencies = np.asarray(bare_frequencies, dtype=float)
    if not 0 <= reference_index < frequencies.size:
        raise ParameterValidationError(
            "Reference mode outside the spectrum",
            details={"reference_index": reference_index, "mode_count": int(frequencies.size)},
        )
    gamma = temperature_from_occupation(n_bar)
    return ThermalState(frequencies=frequencies, gammas=gamma * frequencies / frequencies[reference_index])


@dataclass(frozen=True)
class SpinConfiguration:
    index: int
    spins: Tuple[int, ...]


def spin_configurations(qubit_count: int) -> List[SpinConfiguration]:
    """Product basis in qubit-ion order, +1 before −1"""
    return [SpinConfiguration(j, spins) for j, spins in enumerate(product((1, -1), repeat=qubit_count))]


@dataclass
class GateLayout:
    """Gate pairs, their host sub-crystals and bus modes (all 0-based)"""

    pairs: List[Tuple[int, int]]
    subcrystals: List[List[int]]
    bus_modes: List[int]

    @property
    def qubit_ions(self) -> List[int]:
        return [ion for pair in self.pairs for ion in pair]

    def validate(self) -> List[str]:
        issues = []
        ions = self.qubit_ions
        if len(set(ions)) != len(ions):
            issues.append("gate pairs must be disjoint")
        if len(self.subcrystals) != len(self.pairs):
            issues.append("one sub-crystal per gate pair is required")
        else:
            for pair, host in zip(self.pairs, self.subcrystals):
                if not set(pair) <= set(host):
                    issues.append(f"pair {pair} is not inside its sub-crystal")
        if len(self.bus_modes) != len(self.pairs):
            issues.append("one bus mode per gate pair is required")
        if len(set(self.bus_modes)) != len(self.bus_modes):
            issues.append("gate pairs must use distinct bus modes")
        return issues


def _spin_phases(phases: np.ndarray, layout: GateLayout, spins: np.ndarray) -> np.ndarray:
    """Φ_j − θ_j: acquired spin phase minus the ideal π/4 per pair"""
    ions = layout.qubit_ions
    phi = phases[np.ix_(ions, ions)].copy()
    np.fill_diagonal(phi, 0.0)
    acquired = np.einsum("jm,mn,jn->j", spins, phi, spins)

    position = {ion: k for k, ion in enumerate(ions)}
    ideal = np.zeros(spins.shape[0])
    for m, n in layout.pairs:
        ideal += IDEAL_PAIR_PHASE * spins[:, position[m]] * spins[:, position[n]]
    return acquired - ideal


def gate_fidelity(
    bare_displacements: np.ndarray,
    phases: PhaseMatrix,
    thermal: ThermalState,
    layout: GateLayout,
    tolerance: float = 1e-8,
) -> float:
    """
    F = 4^{-n} Σ_jk e^{i(χ_j − χ_k)} exp[½Σ_p(β_jβ_k* − β_j*β_k − |β_j − β_k|² coth(γ_p/2))]

    with β_j = Σ_m σ_m^j C_g(m, ·) over the qubit ions and χ_j the spin phase
    error of configuration j.
    """
    issues = layout.validate() + thermal.validate()
    if issues:
        raise ParameterValidationError("Invalid fidelity inputs: " + "; ".join(issues), details={"issues": issues})
    c_g = np.asarray(bare_displacements)
    if c_g.shape[1] != thermal.frequencies.size:
        raise DimensionMismatchError(
            "Displacement columns do not match the thermal modes",
            details={"columns": int(c_g.shape[1]), "modes": int(thermal.frequencies.size)},
        )

    ions = layout.qubit_ions
    spins = np.array([s.spins for s in spin_configurations(len(ions))], dtype=float)
    beta = spins @ c_g[ions, :]

    weights = thermal.coth_half
    cross = beta @ beta.conj().T
    weighted = (beta * weights) @ beta.conj().T
    norms = np.real(np.diag(weighted))
    exponent = 1j * cross.imag - 0.5 * (norms[:, None] + norms[None, :] - 2.0 * weighted.real)

    chi = _spin_phases(np.asarray(phases.matrix), layout, spins)
    total = np.sum(np.exp(1j * (chi[:, None] - chi[None, :]) + exponent)) / spins.shape[0] ** 2

    if abs(total.imag) > tolerance:
        raise ConsistencyError(
            "Fidelity sum is not real",
            details={"imaginary_part": float(total.imag)},
        )
    fidelity = float(np.clip(total.real, 0.0, 1.0))
    logger.debug("Fidelity evaluated", qubits=len(ions), modes=int(c_g.shape[1]), fidelity=fidelity)
    return fidelity


def decay_penalty(
    n_rydberg: int,
    excited_duration: float = DEFAULT_EXCITED_DURATION,
    lifetime: float = DEFAULT_RYDBERG_LIFETIME,
) -> float:
    """exp(−n·t/τ_Ryd) for ``n_rydberg`` ions excited for ``excited_duration`` seconds"""
    if n_rydberg < 0 or excited_duration < 0:
        raise ParameterValidationError(
            "Rydberg count and excited duration must be non-negative",
            details={"n_rydberg": n_rydberg, "excited_duration": excited_duration},
        )
    if not lifetime > 0:
        raise ParameterValidationError("Lifetime must be positive", details={"lifetime": lifetime})
    return float(np.exp(-n_rydberg * excited_duration / lifetime))


def max_residual_displacement(coeffs: DisplacementCoefficients, ions: Sequence[int]) -> float:
    return float(np.max(np.abs(coeffs.matrix[list(ions), :]))) if len(ions) else 0.0
