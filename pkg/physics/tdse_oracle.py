"""
Direct Schrödinger-equation check of the Magnus evolution operator.

H_I is diagonal in the σ_z basis, so each spin sector σ evolves its phonon
state independently under H_σ(t) = Σ_j f_j(t) b_j† + h.c. with
f_j(t) = Σ_m σ_m Ω_m(t) η_m^(j) B_m^(j) e^{iω_j t}. Only a handful of ions and
modes are supported; the Fock space is truncated at ``fock_cutoff`` levels per
mode.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from .errors import ConvergenceError, DimensionMismatchError, ParameterValidationError
from .gate_dynamics import GateCoupling, PulseSchedule, displacement_coefficients, phase_matrix
from .normal_modes import ModeDecomposition

logger = structlog.get_logger(__name__)

MAX_IONS = 3
MAX_MODES = 2
MAX_FOCK_CUTOFF = 30


@dataclass
class TdseResult:
    overlap: float
    spins: List[Tuple[int, ...]]
    sector_displacements: Dict[Tuple[int, ...], np.ndarray]
    predicted_displacements: Dict[Tuple[int, ...], np.ndarray]
    top_fock_population: float
    saturation_threshold: float = 1e-6
    final_states: Dict[Tuple[int, ...], np.ndarray] = field(repr=False, default_factory=dict)

    @property
    def saturated(self) -> bool:
        return self.top_fock_population > self.saturation_threshold


def _annihilators(cutoff: int, mode_count: int) -> List[sparse.csr_matrix]:
    single = sparse.diags(np.sqrt(np.arange(1, cutoff)), offsets=1, format="csr")
    eye = sparse.identity(cutoff, format="csr")
    ops = []
    for j in range(mode_count):
        factors = [single if k == j else eye for k in range(mode_count)]
        op = factors[0]
        for factor in factors[1:]:
            op = sparse.kron(op, factor, format="csr")
        ops.append(op)
    return ops


def _coherent_vector(amplitude: complex, cutoff: int) -> np.ndarray:
    """Truncated, renormalised |z⟩ with c_n = c_{n-1}·z/√n"""
    ratios = np.concatenate(([1.0 + 0.0j], amplitude / np.sqrt(np.arange(1, cutoff))))
    vector = np.cumprod(ratios)
    return vector / np.linalg.norm(vector)


def _initial_phonons(amplitudes: Sequence[complex], cutoff: int) -> np.ndarray:
    state = np.ones(1, dtype=complex)
    for z in amplitudes:
        state = np.kron(state, _coherent_vector(complex(z), cutoff))
    return state


def _top_population(state: np.ndarray, cutoff: int, mode_count: int) -> float:
    probabilities = np.abs(state.reshape((cutoff,) * mode_count)) ** 2
    mask = np.zeros_like(probabilities, dtype=bool)
    for axis in range(mode_count):
        index = [slice(None)] * mode_count
        index[axis] = cutoff - 1
        mask[tuple(index)] = True
    return float(probabilities[mask].sum())


def tdse_oracle(
    schedule: PulseSchedule,
    modes: ModeDecomposition,
    coupling: GateCoupling,
    mode_indices: Sequence[int],
    fock_cutoff: int = 20,
    spin_amplitudes: Optional[np.ndarray] = None,
    coherent_amplitudes: Optional[Sequence[complex]] = None,
    t_end: Optional[float] = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    saturation_threshold: float = 1e-6,
) -> TdseResult:
    """
    Integrate every spin sector and compare with the Magnus prediction.

    ``spin_amplitudes`` follows the enumeration of ``itertools.product((1, -1))``
    over the driven ions in schedule order; the default is |+⟩ on every ion.
    The returned overlap is |⟨Ψ_Magnus|Ψ_TDSE⟩|².
    """
    ions = schedule.driven_ions
    selection = sorted(set(int(j) for j in mode_indices))
    issues = []
    if not 1 <= len(ions) <= MAX_IONS:
        issues.append(f"between 1 and {MAX_IONS} driven ions are supported")
    if not 1 <= len(selection) <= MAX_MODES:
        issues.append(f"between 1 and {MAX_MODES} modes are supported")
    if not 2 <= fock_cutoff <= MAX_FOCK_CUTOFF:
        issues.append(f"fock_cutoff must lie in [2, {MAX_FOCK_CUTOFF}]")
    if issues:
        raise ParameterValidationError("TDSE oracle out of range: " + "; ".join(issues), details={"issues": issues})

    spins = list(product((1, -1), repeat=len(ions)))
    if spin_amplitudes is None:
        spin_amplitudes = np.full(len(spins), 1.0 / np.sqrt(len(spins)), dtype=complex)
    spin_amplitudes = np.asarray(spin_amplitudes, dtype=complex)
    if spin_amplitudes.shape != (len(spins),):
        raise DimensionMismatchError(
            "One spin amplitude per sector is required",
            details={"expected": len(spins), "received": list(spin_amplitudes.shape)},
        )
    spin_amplitudes = spin_amplitudes / np.linalg.norm(spin_amplitudes)

    coherent = list(coherent_amplitudes) if coherent_amplitudes is not None else [0.0] * len(selection)
    if len(coherent) != len(selection):
        raise DimensionMismatchError(
            "One coherent amplitude per mode is required",
            details={"expected": len(selection), "received": len(coherent)},
        )

    alpha = displacement_coefficients(schedule, modes, coupling, t_end=t_end, mode_indices=selection)
    phases = phase_matrix(schedule, modes, coupling, t_end=t_end, mode_indices=selection)
    t_end = alpha.t_end
    alpha_driven = alpha.matrix[np.ix_(ions, selection)]
    phi_driven = phases.matrix[np.ix_(ions, ions)]

    omega = modes.frequencies[selection]
    drive = coupling.lamb_dicke(ions, omega) * modes.vectors[np.ix_(ions, selection)]
    lowering = _annihilators(fock_cutoff, len(selection))
    raising = [op.getH().tocsr() for op in lowering]
    psi0 = _initial_phonons(coherent, fock_cutoff)

    fastest = float(np.max(omega)) + schedule.max_nu
    shortest = min(entry.duration for entry in schedule.entries)
    max_step = min(np.pi / fastest, shortest / 10.0)

    amplitude_sum = 0.0 + 0.0j
    top = 0.0
    measured: Dict[Tuple[int, ...], np.ndarray] = {}
    predicted: Dict[Tuple[int, ...], np.ndarray] = {}
    finals: Dict[Tuple[int, ...], np.ndarray] = {}
    initial_mean = np.array([np.vdot(psi0, b @ psi0) for b in lowering])

    for weight, sigma in zip(spin_amplitudes, spins):
        signs = np.array(sigma, dtype=float)

        def rhs(t, psi, signs=signs):
            rabi = np.array([float(entry.rabi(t)) for entry in schedule.entries])
            force = ((signs * rabi) @ drive) * np.exp(1j * omega * t)
            out = np.zeros_like(psi)
            for f, up, down in zip(force, raising, lowering):
                out += f * (up @ psi) + np.conj(f) * (down @ psi)
            return -1j * out

        solution = solve_ivp(rhs, (0.0, t_end), psi0, method="DOP853", rtol=rtol, atol=atol, max_step=max_step)
        if not solution.success:
            raise ConvergenceError("Schrödinger integration failed", details={"message": solution.message})
        final = solution.y[:, -1]

        beta = 1j * (signs @ alpha_driven)
        generator = sparse.csr_matrix((psi0.size, psi0.size), dtype=complex)
        for b_value, up, down in zip(beta, raising, lowering):
            generator = generator + b_value * up - np.conj(b_value) * down
        spin_phase = float(signs @ phi_driven @ signs)
        magnus = np.exp(1j * spin_phase) * expm_multiply(generator, psi0)

        amplitude_sum += abs(weight) ** 2 * np.vdot(magnus, final)
        top = max(top, _top_population(final, fock_cutoff, len(selection)))
        measured[sigma] = np.array([np.vdot(final, b @ final) for b in lowering]) - initial_mean
        predicted[sigma] = beta
        finals[sigma] = final

    if top > saturation_threshold:
        logger.warning("Fock cutoff saturated", top_population=top, cutoff=fock_cutoff)

    return TdseResult(
        overlap=float(abs(amplitude_sum) ** 2),
        spins=spins,
        sector_displacements=measured,
        predicted_displacements=predicted,
        top_fock_population=top,
        saturation_threshold=saturation_threshold,
        final_states=finals,
    )
