"""
Parallel CPF gate protocol: calibrated sine pulses on every gate pair, residual
displacements mapped to the bare modes, thermal fidelity.

Each grid point computes the unit-amplitude phases and displacements once and
rescales them per ion, since φ is quadratic and α linear in the amplitudes.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog
from joblib import Parallel, delayed

from .equilibrium import ChainConfiguration
from .errors import DegenerateDriveError, ParameterValidationError
from .fidelity import (
    DuschinskyMap,
    GateLayout,
    ThermalState,
    bare_frame_displacements,
    duschinsky_map,
    gate_fidelity,
    max_residual_displacement,
    thermal_state,
)
from .gate_dynamics import (
    GateCoupling,
    PulseShape,
    calibration_factors,
    displacement_coefficients,
    parallel_gate_schedule,
    phase_matrix,
)
from .normal_modes import (
    ElectronicAssignment,
    ModeDecomposition,
    assign_bus_modes,
    build_hessian,
    diagonalize,
    dominant_modes,
    subcrystals_from_rydberg_ions,
)
from .trap_units import StateFrequencies

logger = structlog.get_logger(__name__)


class ModeSet(str, Enum):
    ALL = "all"
    LOCALIZED = "localized"
    BARE = "bare"


@dataclass
class GateContext:
    chain: ChainConfiguration
    bare_modes: ModeDecomposition
    shaped_modes: ModeDecomposition
    layout: GateLayout
    coupling: GateCoupling
    thermal: ThermalState
    localized_modes: List[int]
    duration_periods: float = 8.0
    shape: PulseShape = PulseShape.SINE
    quadrature_nodes: int = 20
    quadrature_max_phase: float = np.pi
    _maps: Dict[ModeSet, DuschinskyMap] = field(default_factory=dict, repr=False)

    def modes_for(self, mode_set: ModeSet) -> ModeDecomposition:
        return self.bare_modes if mode_set is ModeSet.BARE else self.shaped_modes

    def mode_indices_for(self, mode_set: ModeSet) -> Optional[List[int]]:
        return self.localized_modes if mode_set is ModeSet.LOCALIZED else None

    def mapping_for(self, mode_set: ModeSet) -> DuschinskyMap:
        if mode_set not in self._maps:
            self._maps[mode_set] = duschinsky_map(self.bare_modes, self.modes_for(mode_set))
        return self._maps[mode_set]

    def bus_frequency(self, mode_set: ModeSet) -> float:
        """Mean bus frequency of the gate pairs; the highest bare mode without shaping"""
        if mode_set is ModeSet.BARE:
            return float(self.bare_modes.frequencies[-1])
        return float(np.mean(self.shaped_modes.frequencies[self.layout.bus_modes]))

    def bus_period(self, mode_set: ModeSet) -> float:
        return 2 * np.pi / self.bus_frequency(mode_set)

    def gate_duration(self, mode_set: ModeSet) -> float:
        return self.duration_periods * self.bus_period(mode_set)


@dataclass
class GatePoint:
    nu_factor: float
    nu: float
    delay: float
    mode_set: ModeSet
    pair_phases: List[float]
    max_abs_alpha: float
    fidelity: float
    amplitudes: Dict[int, float] = field(default_factory=dict)


@dataclass
class DelayPoint:
    delay: float
    delay_periods: float
    best_nu_factor: float
    fidelity_max: float
    mode_set: ModeSet


def _host_subcrystal(pair: Tuple[int, int], candidates: Sequence[Sequence[int]]) -> List[int]:
    for host in candidates:
        if set(pair) <= set(host):
            return list(host)
    raise ParameterValidationError(
        "Gate pair is not enclosed by a sub-crystal",
        details={"pair": [p + 1 for p in pair]},
    )


def build_gate_context(
    chain: ChainConfiguration,
    frequencies: StateFrequencies,
    rydberg_ions: Sequence[int],
    pairs: Sequence[Tuple[int, int]],
    coupling: GateCoupling,
    n_bar: float = 3.25,
    thermal_reference: Optional[int] = None,
    duration_periods: float = 8.0,
    subcrystals: Optional[Sequence[Sequence[int]]] = None,
    shape: PulseShape = PulseShape.SINE,
    quadrature_nodes: int = 20,
    quadrature_max_phase: float = np.pi,
) -> GateContext:
    """
    Bare and shaped modes of one chain plus everything the gate scans share.

    Indices are 0-based. ``thermal_reference`` is the bare mode carrying ``n_bar``
    (default the highest).
    """
    bare = diagonalize(build_hessian(chain, ElectronicAssignment.all_ell(chain.ion_count, frequencies)))
    shaped_assignment = ElectronicAssignment.from_rydberg_ions(chain.ion_count, rydberg_ions, frequencies)
    shaped = diagonalize(build_hessian(chain, shaped_assignment))

    candidates = subcrystals if subcrystals is not None else subcrystals_from_rydberg_ions(
        chain.ion_count, rydberg_ions
    )
    pairs = [tuple(int(i) for i in pair) for pair in pairs]
    hosts = [_host_subcrystal(pair, candidates) for pair in pairs]
    union = sorted({ion for host in hosts for ion in host})
    localized = sorted(dominant_modes(shaped, union))
    layout = GateLayout(pairs=pairs, subcrystals=hosts, bus_modes=assign_bus_modes(shaped, hosts, localized))
    issues = layout.validate()
    if issues:
        raise ParameterValidationError("Invalid gate layout: " + "; ".join(issues), details={"issues": issues})

    reference = bare.mode_count - 1 if thermal_reference is None else thermal_reference
    thermal = thermal_state(bare.frequencies, reference, n_bar)

    logger.info(
        "Gate context built",
        ions=chain.ion_count,
        pairs=[(m + 1, n + 1) for m, n in pairs],
        bus_modes=[j + 1 for j in layout.bus_modes],
        localized_modes=len(localized),
    )
    context = GateContext(
        chain=chain,
        bare_modes=bare,
        shaped_modes=shaped,
        layout=layout,
        coupling=coupling,
        thermal=thermal,
        localized_modes=localized,
        duration_periods=duration_periods,
        shape=shape,
        quadrature_nodes=quadrature_nodes,
        quadrature_max_phase=quadrature_max_phase,
    )
    for mode_set in ModeSet:
        context.mapping_for(mode_set)
    return context


def evaluate_gate_point(
    context: GateContext,
    nu_factor: float,
    delay: float = 0.0,
    mode_set: ModeSet = ModeSet.ALL,
) -> GatePoint:
    """
    Calibrated fidelity at ν = nu_factor·2π/τ.

    The first pair starts at t = 0 and every later pair at ``delay`` (scaled
    time). A point whose unit phase vanishes is returned with NaN fidelity.
    """
    mode_set = ModeSet(mode_set)
    modes = context.modes_for(mode_set)
    tau = context.gate_duration(mode_set)
    nu = nu_factor * 2 * np.pi / tau
    pairs = context.layout.pairs
    starts = [0.0] + [delay] * (len(pairs) - 1)
    schedule = parallel_gate_schedule(pairs, nu, tau, starts, amplitude=1.0, shape=context.shape)
    selection = context.mode_indices_for(mode_set)

    unit_phases = phase_matrix(
        schedule,
        modes,
        context.coupling,
        mode_indices=selection,
        nodes=context.quadrature_nodes,
        max_phase=context.quadrature_max_phase,
    )
    try:
        factors = calibration_factors(unit_phases, pairs)
    except DegenerateDriveError as exc:
        logger.warning("Degenerate drive at scan point", nu_factor=nu_factor, delay=delay, **exc.details)
        return GatePoint(nu_factor, nu, delay, mode_set, [float("nan")] * len(pairs), float("nan"), float("nan"))

    alpha = displacement_coefficients(schedule, modes, context.coupling, mode_indices=selection).scaled(factors)
    phases = unit_phases.scaled(factors)
    bare_alpha = bare_frame_displacements(alpha, context.mapping_for(mode_set))
    fidelity = gate_fidelity(bare_alpha, phases, context.thermal, context.layout)

    return GatePoint(
        nu_factor=float(nu_factor),
        nu=float(nu),
        delay=float(delay),
        mode_set=mode_set,
        pair_phases=[phases.pair(m, n) for m, n in pairs],
        max_abs_alpha=max_residual_displacement(alpha, context.layout.qubit_ions),
        fidelity=fidelity,
        amplitudes=factors,
    )


def scan_frequency(
    context: GateContext,
    nu_factors: Sequence[float],
    delay: float = 0.0,
    mode_set: ModeSet = ModeSet.ALL,
    n_jobs: int = 1,
) -> List[GatePoint]:
    """Points in grid order regardless of completion order"""
    return Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(evaluate_gate_point)(context, float(f), delay, mode_set) for f in nu_factors
    )


def scan_delay(
    context: GateContext,
    delay_periods: Sequence[float],
    nu_factors: Sequence[float],
    mode_set: ModeSet = ModeSet.ALL,
    n_jobs: int = 1,
) -> List[DelayPoint]:
    """ν-optimised fidelity for every delay, given in bus periods"""
    mode_set = ModeSet(mode_set)
    period = context.bus_period(mode_set)
    grid = [(float(d), float(f)) for d in delay_periods for f in nu_factors]
    points = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(evaluate_gate_point)(context, f, d * period, mode_set) for d, f in grid
    )

    results = []
    width = len(nu_factors)
    for k, periods in enumerate(delay_periods):
        row = points[k * width:(k + 1) * width]
        values = np.array([p.fidelity for p in row])
        if np.all(np.isnan(values)):
            best_factor, best = float("nan"), float("nan")
        else:
            index = int(np.nanargmax(values))
            best_factor, best = row[index].nu_factor, float(values[index])
        results.append(DelayPoint(float(periods) * period, float(periods), best_factor, best, mode_set))
    return results


def gate_points_frame(points: Sequence[GatePoint]) -> pd.DataFrame:
    def pair_phase(point, k):
        return point.pair_phases[k] if k < len(point.pair_phases) else float("nan")

    return pd.DataFrame(
        {
            "nu_over_omegas": [p.nu for p in points],
            "nu_tau_over_2pi": [p.nu_factor for p in points],
            "delay": [p.delay for p in points],
            "phi_11": [pair_phase(p, 0) for p in points],
            "phi_22": [pair_phase(p, 1) for p in points],
            "max_abs_alpha": [p.max_abs_alpha for p in points],
            "fidelity": [p.fidelity for p in points],
            "mode_set": [p.mode_set.value for p in points],
        }
    )


def delay_points_frame(points: Sequence[DelayPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "delay": [p.delay for p in points],
            "delay_over_bus_period": [p.delay_periods for p in points],
            "best_nu_tau_over_2pi": [p.best_nu_factor for p in points],
            "fidelity_max": [p.fidelity_max for p in points],
            "mode_set": [p.mode_set.value for p in points],
        }
    )


def best_point(points: Sequence[GatePoint]) -> Optional[GatePoint]:
    finite = [p for p in points if np.isfinite(p.fidelity)]
    return max(finite, key=lambda p: p.fidelity) if finite else None
