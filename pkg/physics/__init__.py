"""
Numerical core: trap units, chain equilibrium, transverse modes, gate dynamics,
fidelity and Rydberg excitation.
"""

from .equilibrium import ChainConfiguration, solve_equilibrium
from .errors import (
    ArtifactError,
    ConvergenceError,
    ParameterValidationError,
    SimulationError,
)
from .fidelity import decay_penalty, duschinsky_map, gate_fidelity, thermal_state
from .gate_dynamics import (
    GateCoupling,
    PulseSchedule,
    PulseShape,
    displacement_coefficients,
    phase_matrix,
)
from .gate_protocol import ModeSet, build_gate_context, evaluate_gate_point, scan_delay, scan_frequency
from .normal_modes import ElectronicAssignment, ModeDecomposition, build_hessian, diagonalize
from .rydberg_excitation import DressedSystem, adiabatic_ramp, dressed_analysis, evolve_three_level
from .trap_units import PhysicalConstants, StateFrequencies, TrapParameters, derive_scaled_units

__all__ = [
    'ChainConfiguration',
    'solve_equilibrium',
    'ArtifactError',
    'ConvergenceError',
    'ParameterValidationError',
    'SimulationError',
    'decay_penalty',
    'duschinsky_map',
    'gate_fidelity',
    'thermal_state',
    'GateCoupling',
    'PulseSchedule',
    'PulseShape',
    'displacement_coefficients',
    'phase_matrix',
    'ModeSet',
    'build_gate_context',
    'evaluate_gate_point',
    'scan_delay',
    'scan_frequency',
    'ElectronicAssignment',
    'ModeDecomposition',
    'build_hessian',
    'diagonalize',
    'DressedSystem',
    'adiabatic_ramp',
    'dressed_analysis',
    'evolve_three_level',
    'PhysicalConstants',
    'StateFrequencies',
    'TrapParameters',
    'derive_scaled_units'
]
