"""
Microwave-dressed Rydberg excitation.

Basis (|D⟩, |P⟩, |S⟩) in the rotating frame, SI angular frequencies:

    H = [[0,      Ω_L/2,   0     ],
         [Ω_L/2,  Δ_P,     Ω_MW/2],
         [0,      Ω_MW/2,  Δ_S   ]]

The microwave mixes |P⟩ and |S⟩ into |±⟩ = N_±(C_±|P⟩ + |S⟩) whose
polarizability N_±²(C_±²P_nP + P_nS) vanishes for the right mixing.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd
import structlog

from .errors import NoZeroCrossingError, ParameterValidationError, StepControlError

logger = structlog.get_logger(__name__)

MIN_STEPS_PER_PERIOD = 50
SWEEP_DIVISOR = 4.7
P_STATE_POLARIZABILITY_PER_N7 = -0.25
S_TO_P_POLARIZABILITY_RATIO = 0.4624


@dataclass(frozen=True)
class DressedSystem:
    delta_s: float
    delta_p: float
    omega_mw: float
    omega_l: float = 0.0

    @property
    def delta_plus(self) -> float:
        return self.delta_p + self.delta_s

    @property
    def delta_minus(self) -> float:
        return self.delta_p - self.delta_s

    def validate(self) -> List[str]:
        issues = []
        if not self.omega_mw > 0:
            issues.append("omega_mw must be positive")
        if self.omega_l < 0:
            issues.append("omega_l must not be negative")
        return issues

    def with_laser(self, omega_l: float) -> "DressedSystem":
        return DressedSystem(self.delta_s, self.delta_p, self.omega_mw, omega_l)


@dataclass(frozen=True)
class DressedStates:
    c_plus: float
    c_minus: float
    n_plus: float
    n_minus: float
    e_plus: float
    e_minus: float
    omega_plus: float
    omega_minus: float

    def vectors(self) -> np.ndarray:
        """Columns |+⟩, |−⟩ in the (P, S) basis"""
        return np.array(
            [
                [self.n_plus * self.c_plus, self.n_minus * self.c_minus],
                [self.n_plus, self.n_minus],
            ]
        )

    @property
    def splitting(self) -> float:
        return self.e_plus - self.e_minus


def dressed_analysis(system: DressedSystem) -> DressedStates:
    issues = system.validate()
    if issues:
        raise ParameterValidationError("Invalid dressed system: " + "; ".join(issues), details={"issues": issues})

    mw = system.omega_mw
    root = math.hypot(mw, system.delta_minus)
    c_plus = (system.delta_minus + root) / mw
    c_minus = (system.delta_minus - root) / mw
    n_plus = 1.0 / math.sqrt(1.0 + c_plus**2)
    n_minus = 1.0 / math.sqrt(1.0 + c_minus**2)
    return DressedStates(
        c_plus=c_plus,
        c_minus=c_minus,
        n_plus=n_plus,
        n_minus=n_minus,
        e_plus=0.5 * system.delta_plus + 0.5 * root,
        e_minus=0.5 * system.delta_plus - 0.5 * root,
        omega_plus=mw * system.omega_l / (2 * root * n_plus),
        omega_minus=mw * system.omega_l / (2 * root * n_minus),
    )


def laser_rabi_for_dressed_coupling(system: DressedSystem, omega_minus: float) -> float:
    """Ω_L that yields the requested effective coupling Ω_− to |−⟩"""
    root = math.hypot(system.omega_mw, system.delta_minus)
    n_minus = dressed_analysis(system).n_minus
    return omega_minus * 2 * root * n_minus / system.omega_mw


def rydberg_polarizabilities(principal_number: int) -> Tuple[float, float]:
    """(P_nP, P_n'S) in atomic units; the S value is the one nulling |C| = 0.68"""
    p_np = P_STATE_POLARIZABILITY_PER_N7 * principal_number**7
    return p_np, -S_TO_P_POLARIZABILITY_RATIO * p_np


def polarizability_for_mixing(mixing: float, p_np: float, p_ns: float) -> float:
    return (mixing**2 * p_np + p_ns) / (1.0 + mixing**2)


def dressed_polarizability(states: DressedStates, p_np: float, p_ns: float) -> Tuple[float, float]:
    """(P_+, P_−)"""
    return (
        states.n_plus**2 * (states.c_plus**2 * p_np + p_ns),
        states.n_minus**2 * (states.c_minus**2 * p_np + p_ns),
    )


def polarizability_zero_mixing(p_np: float, p_ns: float) -> float:
    """|C| with C²P_nP + P_nS = 0"""
    if p_np == 0 or p_np * p_ns >= 0:
        raise NoZeroCrossingError(
            "Polarizabilities of equal sign cannot cancel",
            details={"p_np": p_np, "p_ns": p_ns},
        )
    return math.sqrt(-p_ns / p_np)


def hamiltonian(system: DressedSystem, delta_s: Optional[float] = None) -> np.ndarray:
    ds = system.delta_s if delta_s is None else delta_s
    half_l, half_mw = 0.5 * system.omega_l, 0.5 * system.omega_mw
    return np.array(
        [
            [0.0, half_l, 0.0],
            [half_l, system.delta_p, half_mw],
            [0.0, half_mw, ds],
        ],
        dtype=complex,
    )


@dataclass
class ThreeLevelTrajectory:
    """Sampled amplitudes (c_D, c_P, c_S) and the S detuning in force at each sample"""

    times: np.ndarray
    amplitudes: np.ndarray
    system: DressedSystem
    delta_s: np.ndarray
    step: float

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.sum(self.populations, axis=1) - 1.0)))

    def dressed_populations(self) -> np.ndarray:
        """Populations of the instantaneous |−⟩ and |+⟩"""
        result = np.empty((self.times.size, 2))
        for k, ds in enumerate(self.delta_s):
            vectors = dressed_analysis(
                DressedSystem(float(ds), self.system.delta_p, self.system.omega_mw)
            ).vectors()
            overlaps = vectors.T @ self.amplitudes[k, 1:]
            result[k] = np.abs(overlaps[1]) ** 2, np.abs(overlaps[0]) ** 2
        return result


def _rate(system: DressedSystem, delta_s_extreme: float) -> float:
    return max(
        system.omega_mw,
        abs(system.delta_p + delta_s_extreme),
        abs(system.delta_p - delta_s_extreme),
        abs(system.delta_plus),
        abs(system.delta_minus),
        system.omega_l,
    )


def _step_count(duration: float, rate: float, steps_per_period: int, samples: int) -> int:
    if steps_per_period < MIN_STEPS_PER_PERIOD:
        raise StepControlError(
            "Fixed step exceeds the stability bound",
            details={"steps_per_period": steps_per_period, "minimum": MIN_STEPS_PER_PERIOD},
        )
    if not duration > 0 or samples < 2:
        raise ParameterValidationError(
            "Duration must be positive and at least two samples are required",
            details={"duration": duration, "samples": samples},
        )
    intervals = samples - 1
    per_interval = max(1, math.ceil(duration * steps_per_period * rate / intervals))
    return per_interval * intervals


def _initial_state(initial: Optional[np.ndarray]) -> np.ndarray:
    if initial is None:
        return np.array([1.0, 0.0, 0.0], dtype=complex)
    state = np.asarray(initial, dtype=complex)
    return state / np.linalg.norm(state)


def evolve_three_level(
    system: DressedSystem,
    duration: float,
    initial: Optional[np.ndarray] = None,
    steps_per_period: int = 100,
    samples: int = 501,
) -> ThreeLevelTrajectory:
    """
    Fixed-step RK4 for constant H.

    The RK4 update for a constant generator is the polynomial
    Σ_{k≤4} (−iHh)^k/k!, so one propagator per sampling interval is formed by
    matrix power and applied between samples.
    """
    rate = _rate(system, system.delta_s)
    steps = _step_count(duration, rate, steps_per_period, samples)
    h = duration / steps
    generator = -1j * hamiltonian(system) * h

    step_matrix = np.eye(3, dtype=complex)
    term = np.eye(3, dtype=complex)
    for k in range(1, 5):
        term = term @ generator / k
        step_matrix = step_matrix + term
    interval = np.linalg.matrix_power(step_matrix, steps // (samples - 1))

    amplitudes = np.empty((samples, 3), dtype=complex)
    amplitudes[0] = _initial_state(initial)
    for k in range(1, samples):
        amplitudes[k] = interval @ amplitudes[k - 1]

    trajectory = ThreeLevelTrajectory(
        times=np.linspace(0.0, duration, samples),
        amplitudes=amplitudes,
        system=system,
        delta_s=np.full(samples, system.delta_s),
        step=h,
    )
    logger.debug("Three-level evolution finished", steps=steps, step=h, norm_drift=trajectory.norm_drift)
    return trajectory


def evolve_dressed_model(
    system: DressedSystem, times, include_plus: bool = True, initial: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Amplitudes in the reduced (|D⟩, |−⟩, |+⟩) model, exact exponentiation.

    With ``include_plus`` False only the resonant D ↔ |−⟩ pair is kept.
    """
    states = dressed_analysis(system)
    h = np.array(
        [
            [0.0, -0.5 * states.omega_minus, 0.5 * states.omega_plus],
            [-0.5 * states.omega_minus, states.e_minus, 0.0],
            [0.5 * states.omega_plus, 0.0, states.e_plus],
        ]
    )
    if not include_plus:
        h = h[:2, :2]
    energies, vectors = np.linalg.eigh(h)
    start = np.zeros(h.shape[0], dtype=complex)
    if initial is None:
        start[0] = 1.0
    else:
        start[:] = np.asarray(initial, dtype=complex)[: h.shape[0]]
    weights = vectors.conj().T @ start
    times = np.asarray(times, dtype=float)
    return (vectors @ (weights[:, None] * np.exp(-1j * np.outer(energies, times)))).T


def ramp_detuning(system: DressedSystem, sweep_rate: float, cutoff: float = 20.0) -> Callable[[float], float]:
    """
    Δ_S(t) = Δ_P + Δ_SP(0)(1 − c²t²), held once |Δ_SP| reaches cutoff·Ω_MW.
    """
    initial = system.delta_s - system.delta_p
    limit = cutoff * system.omega_mw

    def delta_s(t: float) -> float:
        sweep = initial * (1.0 - (sweep_rate * t) ** 2)
        if abs(sweep) >= limit:
            sweep = math.copysign(limit, sweep)
        return system.delta_p + sweep

    return delta_s


def ramp_hold_time(system: DressedSystem, sweep_rate: float, cutoff: float = 20.0) -> float:
    """Time at which the sweep reaches its hold value (inf when it never does)"""
    initial = abs(system.delta_s - system.delta_p)
    limit = cutoff * system.omega_mw
    if sweep_rate == 0 or initial == 0:
        return math.inf
    if initial >= limit:
        return 0.0
    return math.sqrt(limit / initial + 1.0) / sweep_rate


def adiabatic_ramp(
    system: DressedSystem,
    sweep_rate: float,
    duration: float,
    cutoff: float = 20.0,
    steps_per_period: int = 100,
    samples: int = 501,
) -> ThreeLevelTrajectory:
    """Microwave sweep with the laser off, starting in the dressed |−⟩"""
    if system.omega_l != 0:
        raise ParameterValidationError(
            "The Rydberg laser must be off during the ramp", details={"omega_l": system.omega_l}
        )

    delta_s = ramp_detuning(system, sweep_rate, cutoff)
    extreme = delta_s(min(duration, ramp_hold_time(system, sweep_rate, cutoff)))
    rate = _rate(system, max(abs(system.delta_s), abs(extreme)))
    steps = _step_count(duration, rate, steps_per_period, samples)
    h = duration / steps
    per_sample = steps // (samples - 1)

    minus = dressed_analysis(system).vectors()[:, 1]
    half_l, half_mw, delta_p = 0.5 * system.omega_l, 0.5 * system.omega_mw, system.delta_p

    # scalar arithmetic; the step count makes array overhead dominate
    def derivative(t, d, p, s):
        return (
            -1j * (half_l * p),
            -1j * (half_l * d + delta_p * p + half_mw * s),
            -1j * (half_mw * p + delta_s(t) * s),
        )

    amplitudes = np.empty((samples, 3), dtype=complex)
    d, p, s = 0j, complex(minus[0]), complex(minus[1])
    amplitudes[0] = (d, p, s)
    half = 0.5 * h
    sixth = h / 6.0
    step_index = 0
    for k in range(1, samples):
        for _ in range(per_sample):
            t = step_index * h
            a1, b1, c1 = derivative(t, d, p, s)
            a2, b2, c2 = derivative(t + half, d + half * a1, p + half * b1, s + half * c1)
            a3, b3, c3 = derivative(t + half, d + half * a2, p + half * b2, s + half * c2)
            a4, b4, c4 = derivative(t + h, d + h * a3, p + h * b3, s + h * c3)
            d += sixth * (a1 + 2 * a2 + 2 * a3 + a4)
            p += sixth * (b1 + 2 * b2 + 2 * b3 + b4)
            s += sixth * (c1 + 2 * c2 + 2 * c3 + c4)
            step_index += 1
        amplitudes[k] = (d, p, s)

    times = np.linspace(0.0, duration, samples)
    trajectory = ThreeLevelTrajectory(
        times=times,
        amplitudes=amplitudes,
        system=system,
        delta_s=np.array([delta_s(float(x)) for x in times]),
        step=h,
    )
    logger.debug("Adiabatic ramp finished", steps=steps, sweep_rate=sweep_rate, norm_drift=trajectory.norm_drift)
    return trajectory


def transfer_time(trajectory: ThreeLevelTrajectory, threshold: float = 0.99, level: int = 1) -> Optional[float]:
    """First sample time after which the population of ``level`` never drops below threshold"""
    population = trajectory.populations[:, level]
    below = np.flatnonzero(population < threshold)
    if below.size == 0:
        return float(trajectory.times[0])
    if below[-1] == population.size - 1:
        return None
    return float(trajectory.times[below[-1] + 1])


def trajectory_frame(trajectory: ThreeLevelTrajectory) -> pd.DataFrame:
    populations = trajectory.populations
    dressed = trajectory.dressed_populations()
    return pd.DataFrame(
        {
            "t_ns": trajectory.times * 1e9,
            "pop_D": populations[:, 0],
            "pop_P": populations[:, 1],
            "pop_S": populations[:, 2],
            "pop_minus": dressed[:, 0],
            "pop_plus": dressed[:, 1],
        }
    )
