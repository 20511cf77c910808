"""
Spin-dependent-force gate dynamics in the Magnus picture.

For H_I = Σ_{m,j} Ω_m(t) σ_m η_m^(j) B_m^(j) (b_j† e^{iω_j t} + h.c.) the
evolution operator is exactly

    U = exp[i Σ_m σ_m Σ_j (α_m^(j) b_j† + h.c.) + i Σ_{m≠n} φ_mn σ_m σ_n]

because the commutator of H_I with itself is a c-number times σσ, so every
Magnus term beyond second order vanishes. The sum over m≠n runs over ordered
pairs, hence φ_mn = π/8 on a pair is the ideal conditional phase.

Displacements use closed-form window integrals; phases integrate the closed-form
inner integral against Gauss-Legendre nodes placed between all window edges.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import structlog
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from .errors import DegenerateDriveError, ParameterValidationError
from .normal_modes import ModeDecomposition
from .trap_units import PhysicalConstants, ScaledUnits

logger = structlog.get_logger(__name__)

TARGET_PHASE = np.pi / 8


class PulseShape(str, Enum):
    SINE = "sine"
    CONSTANT = "constant"


def _phase_integral(kappa, s):
    """∫_0^s e^{iκu} du, finite as κ → 0"""
    half = 0.5 * kappa * s
    return s * np.exp(1j * half) * np.sinc(half / np.pi)


@dataclass(frozen=True)
class PulseEntry:
    """Drive on one ion: Ω0·sin(ν(t − t_start)) on [t_start, t_start + τ]"""

    ion: int
    amplitude: float
    nu: float
    t_start: float
    duration: float
    shape: PulseShape = PulseShape.SINE

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration

    def rabi(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.t_start) & (t <= self.t_end)
        if self.shape is PulseShape.SINE:
            values = self.amplitude * np.sin(self.nu * (t - self.t_start))
        else:
            values = np.full_like(t, self.amplitude)
        return np.where(inside, values, 0.0)

    def integral(self, k, upper):
        """
        ∫ Ω(t) e^{ikt} dt from t_start to min(upper, t_end).

        ``k`` indexes the last axis of the result, ``upper`` the leading ones.
        """
        k = np.atleast_1d(np.asarray(k, dtype=float))
        s = np.clip(np.asarray(upper, dtype=float) - self.t_start, 0.0, self.duration)[..., None]
        if self.shape is PulseShape.SINE:
            inner = (_phase_integral(k + self.nu, s) - _phase_integral(k - self.nu, s)) / 2j
        else:
            inner = _phase_integral(k, s)
        return self.amplitude * np.exp(1j * k * self.t_start) * inner


@dataclass(frozen=True)
class PulseSchedule:
    entries: Tuple[PulseEntry, ...]

    @property
    def driven_ions(self) -> List[int]:
        return [entry.ion for entry in self.entries]

    @property
    def end_time(self) -> float:
        return max((entry.t_end for entry in self.entries), default=0.0)

    @property
    def max_nu(self) -> float:
        return max((abs(entry.nu) for entry in self.entries), default=0.0)

    def entry_for(self, ion: int) -> PulseEntry:
        for entry in self.entries:
            if entry.ion == ion:
                return entry
        raise ParameterValidationError("Ion is not driven by this schedule", details={"ion": ion})

    def breakpoints(self) -> np.ndarray:
        edges = {entry.t_start for entry in self.entries} | {entry.t_end for entry in self.entries}
        return np.array(sorted(edges))

    def validate(self, ion_count: Optional[int] = None) -> List[str]:
        issues = []
        ions = self.driven_ions
        if len(set(ions)) != len(ions):
            issues.append("each ion may appear in at most one pulse entry")
        for entry in self.entries:
            if not entry.duration > 0:
                issues.append(f"pulse on ion {entry.ion} must have positive duration")
            if entry.t_start < 0:
                issues.append(f"pulse on ion {entry.ion} starts before t = 0")
            if ion_count is not None and not 0 <= entry.ion < ion_count:
                issues.append(f"pulse ion {entry.ion} outside the chain")
        return issues

    def scaled(self, factors: Mapping[int, float]) -> "PulseSchedule":
        return PulseSchedule(
            tuple(replace(e, amplitude=e.amplitude * factors.get(e.ion, 1.0)) for e in self.entries)
        )

    def shifted(self, delta: float) -> "PulseSchedule":
        return PulseSchedule(tuple(replace(e, t_start=e.t_start + delta) for e in self.entries))

    def restricted(self, ions: Iterable[int]) -> "PulseSchedule":
        keep = set(ions)
        return PulseSchedule(tuple(e for e in self.entries if e.ion in keep))


def parallel_gate_schedule(
    pairs: Sequence[Tuple[int, int]],
    nu: float,
    duration: float,
    delays: Optional[Sequence[float]] = None,
    amplitude: float = 1.0,
    shape: PulseShape = PulseShape.SINE,
) -> PulseSchedule:
    """Same pulse on both ions of every pair, pair k starting at delays[k]"""
    delays = list(delays) if delays is not None else [0.0] * len(pairs)
    if len(delays) != len(pairs):
        raise ParameterValidationError(
            "One start delay per gate pair is required",
            details={"pairs": len(pairs), "delays": len(delays)},
        )
    entries = []
    for (m, n), start in zip(pairs, delays):
        for ion in (m, n):
            entries.append(PulseEntry(ion, amplitude, nu, float(start), duration, shape))
    return PulseSchedule(tuple(entries))


@dataclass(frozen=True)
class GateCoupling:
    """
    Lamb-Dicke parameters η_m^(j) = η_ref · scale_m · √(ω_ref/ω_j).

    ``ion_scale`` lets individual ions see a different effective wavenumber.
    """

    eta_ref: float = 0.1
    omega_ref: float = 150.0
    ion_scale: Mapping[int, float] = field(default_factory=dict)

    @classmethod
    def from_wavenumber(
        cls,
        wavenumber: float,
        units: ScaledUnits,
        consts: PhysicalConstants,
        omega_ref: float = 150.0,
        ion_scale: Optional[Mapping[int, float]] = None,
    ) -> "GateCoupling":
        """η_ref = k·√(ħ/2Mω_ref) for a laser wavenumber ``k`` in rad/m"""
        omega_si = omega_ref * units.frequency_scale
        oscillator_length = np.sqrt(consts.reduced_planck / (2 * consts.ion_mass * omega_si))
        return cls(
            eta_ref=float(wavenumber * oscillator_length),
            omega_ref=omega_ref,
            ion_scale=dict(ion_scale or {}),
        )

    def validate(self) -> List[str]:
        issues = []
        if not self.eta_ref > 0:
            issues.append("eta_ref must be positive")
        if not self.omega_ref > 0:
            issues.append("omega_ref must be positive")
        if any(not v > 0 for v in self.ion_scale.values()):
            issues.append("per-ion Lamb-Dicke scales must be positive")
        return issues

    def lamb_dicke(self, ions: Sequence[int], frequencies) -> np.ndarray:
        scale = np.array([self.ion_scale.get(int(m), 1.0) for m in ions], dtype=float)
        frequencies = np.asarray(frequencies, dtype=float)
        return self.eta_ref * scale[:, None] * np.sqrt(self.omega_ref / frequencies)[None, :]


def _scale_vector(size: int, factors: Mapping[int, float]) -> np.ndarray:
    vector = np.ones(size)
    for ion, value in factors.items():
        vector[ion] = value
    return vector


@dataclass
class DisplacementCoefficients:
    """α_m^(j) with one row per ion (zero when undriven) and one column per mode"""

    matrix: np.ndarray
    t_end: float
    mode_indices: Optional[Tuple[int, ...]] = None

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def scaled(self, factors: Mapping[int, float]) -> "DisplacementCoefficients":
        scale = _scale_vector(self.matrix.shape[0], factors)
        return DisplacementCoefficients(self.matrix * scale[:, None], self.t_end, self.mode_indices)


@dataclass
class PhaseMatrix:
    """Symmetric φ_mn with zero diagonal, coefficient of σ_mσ_n over ordered pairs"""

    matrix: np.ndarray
    t_end: float
    mode_indices: Optional[Tuple[int, ...]] = None

    def pair(self, m: int, n: int) -> float:
        return float(self.matrix[m, n])

    def scaled(self, factors: Mapping[int, float]) -> "PhaseMatrix":
        scale = _scale_vector(self.matrix.shape[0], factors)
        return PhaseMatrix(self.matrix * np.outer(scale, scale), self.t_end, self.mode_indices)


def _selection(modes: ModeDecomposition, mode_indices: Optional[Sequence[int]]) -> np.ndarray:
    if mode_indices is None:
        return np.arange(modes.mode_count)
    selection = np.asarray(sorted(set(int(j) for j in mode_indices)), dtype=int)
    if selection.size and (selection[0] < 0 or selection[-1] >= modes.mode_count):
        raise ParameterValidationError(
            "Mode index outside the decomposition",
            details={"mode_indices": selection.tolist(), "mode_count": modes.mode_count},
        )
    return selection


def _prepare(schedule, modes, coupling, t_end, mode_indices):
    issues = schedule.validate(modes.vectors.shape[0]) + coupling.validate()
    if issues:
        raise ParameterValidationError("Invalid gate drive: " + "; ".join(issues), details={"issues": issues})
    t_end = schedule.end_time if t_end is None else float(t_end)
    if t_end < schedule.end_time - 1e-12:
        raise ParameterValidationError(
            "t_end precedes the end of a pulse",
            details={"t_end": t_end, "last_pulse_end": schedule.end_time},
        )
    selection = _selection(modes, mode_indices)
    ions = schedule.driven_ions
    omega = modes.frequencies[selection]
    drive = coupling.lamb_dicke(ions, omega) * modes.vectors[np.ix_(ions, selection)]
    chosen = None if mode_indices is None else tuple(int(j) for j in selection)
    return t_end, selection, ions, omega, drive, chosen


def _quadrature_integral(entry: PulseEntry, omega: float, epsabs: float) -> complex:
    def envelope(t):
        return float(entry.rabi(t))

    bounds = (entry.t_start, entry.t_end)
    real, _ = quad(envelope, *bounds, weight="cos", wvar=omega, epsabs=epsabs, epsrel=1e-12, limit=1000)
    imag, _ = quad(envelope, *bounds, weight="sin", wvar=omega, epsabs=epsabs, epsrel=1e-12, limit=1000)
    return complex(real, imag)


def displacement_coefficients(
    schedule: PulseSchedule,
    modes: ModeDecomposition,
    coupling: GateCoupling,
    t_end: Optional[float] = None,
    mode_indices: Optional[Sequence[int]] = None,
    method: str = "closed_form",
    epsabs: float = 1e-12,
) -> DisplacementCoefficients:
    """α_m^(j) = −η_m^(j) B_m^(j) ∫₀^{t_end} Ω_m(t) e^{iω_j t} dt"""
    t_end, selection, ions, omega, drive, chosen = _prepare(schedule, modes, coupling, t_end, mode_indices)

    forcing = np.zeros((len(ions), selection.size), dtype=complex)
    for a, entry in enumerate(schedule.entries):
        if method == "closed_form":
            forcing[a] = entry.integral(omega, t_end)
        elif method == "quadrature":
            forcing[a] = [_quadrature_integral(entry, w, epsabs) for w in omega]
        else:
            raise ParameterValidationError("Unknown integration method", details={"method": method})

    matrix = np.zeros((modes.vectors.shape[0], modes.mode_count), dtype=complex)
    matrix[np.ix_(ions, selection)] = -drive * forcing
    return DisplacementCoefficients(matrix=matrix, t_end=t_end, mode_indices=chosen)


def _window_nodes(entry: PulseEntry, breakpoints: np.ndarray, rate: float, nodes: int, max_phase: float):
    inner = breakpoints[(breakpoints > entry.t_start) & (breakpoints < entry.t_end)]
    edges = np.concatenate(([entry.t_start], inner, [entry.t_end]))
    x, w = leggauss(nodes)

    times, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        pieces = max(1, int(np.ceil((hi - lo) * rate / max_phase)))
        bounds = np.linspace(lo, hi, pieces + 1)
        half = 0.5 * np.diff(bounds)[:, None]
        middle = 0.5 * (bounds[1:] + bounds[:-1])[:, None]
        times.append((middle + half * x[None, :]).ravel())
        weights.append((half * w[None, :]).ravel())
    return np.concatenate(times), np.concatenate(weights)


def phase_kernel(
    schedule: PulseSchedule,
    omega: np.ndarray,
    nodes: int = 20,
    max_phase: float = np.pi,
) -> np.ndarray:
    """
    K[a, b, j] = ∫dt ∫^t dt′ Ω_a(t) Ω_b(t′) sin(ω_j (t − t′)) for driven ions a, b.

    Evaluated as Im ∫ Ω_a(t) e^{iω t} A_b(t) dt with A_b the closed-form
    running integral of Ω_b(t′) e^{−iω t′}.
    """
    entries = schedule.entries
    omega = np.asarray(omega, dtype=float)
    kernel = np.zeros((len(entries), len(entries), omega.size))
    if omega.size == 0:
        return kernel

    rate = float(np.max(np.abs(omega))) + 2.0 * schedule.max_nu + 1e-12
    breakpoints = schedule.breakpoints()
    for a, outer_entry in enumerate(entries):
        t, w = _window_nodes(outer_entry, breakpoints, rate, nodes, max_phase)
        outer = (w * outer_entry.rabi(t))[:, None] * np.exp(1j * np.outer(t, omega))
        for b, inner_entry in enumerate(entries):
            kernel[a, b] = np.imag(np.sum(outer * inner_entry.integral(-omega, t), axis=0))
    return kernel


def phase_matrix(
    schedule: PulseSchedule,
    modes: ModeDecomposition,
    coupling: GateCoupling,
    t_end: Optional[float] = None,
    mode_indices: Optional[Sequence[int]] = None,
    nodes: int = 20,
    max_phase: float = np.pi,
) -> PhaseMatrix:
    """φ_mn = ½ Σ_j η_m η_n B_m B_n ∫∫ [Ω_m(t)Ω_n(t′) + Ω_n(t)Ω_m(t′)] sin(ω_j(t − t′))"""
    t_end, selection, ions, omega, drive, chosen = _prepare(schedule, modes, coupling, t_end, mode_indices)

    kernel = phase_kernel(schedule, omega, nodes=nodes, max_phase=max_phase)
    symmetric = 0.5 * (kernel + kernel.transpose(1, 0, 2))
    driven = np.einsum("aj,bj,abj->ab", drive, drive, symmetric)
    np.fill_diagonal(driven, 0.0)

    matrix = np.zeros((modes.vectors.shape[0],) * 2)
    matrix[np.ix_(ions, ions)] = driven
    return PhaseMatrix(matrix=matrix, t_end=t_end, mode_indices=chosen)


def amplitude_for_phase(unit_phase: float, target: float = TARGET_PHASE) -> float:
    """Amplitude that turns a unit-amplitude phase into the target (φ ∝ Ω0²)"""
    if not np.isfinite(unit_phase) or abs(unit_phase) < 1e-300:
        raise DegenerateDriveError(
            "Unit-amplitude phase vanishes; no amplitude reaches the target",
            details={"unit_phase": float(unit_phase)},
        )
    return float(np.sqrt(target / abs(unit_phase)))


def calibration_factors(
    unit_phases: PhaseMatrix, pairs: Sequence[Tuple[int, int]], target: float = TARGET_PHASE
) -> Dict[int, float]:
    """
    Per-ion amplitude factors setting every pair phase to the target.

    A negative unit phase is compensated by reversing the drive on the second
    ion of the pair (a π shift of its laser phase).
    """
    factors: Dict[int, float] = {}
    for m, n in pairs:
        unit = unit_phases.pair(m, n)
        amplitude = amplitude_for_phase(unit, target)
        factors[m] = amplitude
        factors[n] = amplitude if unit > 0 else -amplitude
    return factors


def calibrate_amplitude(
    schedule_template: PulseSchedule,
    modes: ModeDecomposition,
    coupling: GateCoupling,
    gate_pair: Tuple[int, int],
    t_end: Optional[float] = None,
    mode_indices: Optional[Sequence[int]] = None,
    target: float = TARGET_PHASE,
) -> float:
    """Ω0 = √(target / φ_mn|Ω0=1) for the two ions of ``gate_pair``"""
    m, n = gate_pair
    unit = PulseSchedule(
        tuple(replace(schedule_template.entry_for(ion), amplitude=1.0) for ion in (m, n))
    )
    phases = phase_matrix(unit, modes, coupling, t_end=t_end, mode_indices=mode_indices)
    unit_phase = phases.pair(m, n)
    amplitude = amplitude_for_phase(unit_phase, target)
    if unit_phase < 0:
        logger.debug("Negative unit phase, drive on second ion must be reversed", pair=gate_pair)
    return amplitude


def calibrated_schedule(
    schedule_template: PulseSchedule,
    modes: ModeDecomposition,
    coupling: GateCoupling,
    pairs: Sequence[Tuple[int, int]],
    t_end: Optional[float] = None,
    mode_indices: Optional[Sequence[int]] = None,
    target: float = TARGET_PHASE,
) -> PulseSchedule:
    unit = PulseSchedule(tuple(replace(e, amplitude=1.0) for e in schedule_template.entries))
    phases = phase_matrix(unit, modes, coupling, t_end=t_end, mode_indices=mode_indices)
    return unit.scaled(calibration_factors(phases, pairs, target))
