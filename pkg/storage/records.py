"""
Result records written by the runners.

``ReproductionSummary`` is the document behind ``summary.json``; its JSON Schema ships
as ``schemas/reproduction_summary.schema.json``.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class Record(BaseModel):
    model_config = ConfigDict(extra="forbid")


class UnitsRecord(Record):
    length_scale_um: float
    frequency_scale_rad_s: float
    k4: float
    omega_ell_over_omegas: float
    omega_ell_mhz: float
    bus_period_us: float
    gate_time_us: float


class EquilibriumRecord(Record):
    ion_count: int
    iterations: int
    residual: float
    central_mean_spacing: Optional[float] = None
    central_relative_std: Optional[float] = None
    central_mean_spacing_um: Optional[float] = None


class LocalizationRecord(Record):
    scenario: str
    rydberg_ions: List[int]
    subcrystals: List[List[int]]
    localized_modes: Dict[str, int] = Field(description="Modes above the weight threshold per sub-crystal")
    max_truncation_discrepancy: Optional[float] = None


class GateRecord(Record):
    mode_set: str
    max_fidelity: Optional[float] = None
    best_nu_tau_over_2pi: Optional[float] = None
    max_abs_alpha_at_best: Optional[float] = None
    pair_phases_at_best: List[Optional[float]] = Field(default_factory=list)
    edge_maximum: bool = Field(default=False, description="Best point sits on the first or last grid value")


class DelayRecord(Record):
    mode_set: str
    min_fidelity: Optional[float] = None
    mean_fidelity: Optional[float] = None
    worst_delay_over_bus_period: Optional[float] = None


class BogoliubovRecord(Record):
    orthogonality_error: float
    commutation_error: float


class DecayRecord(Record):
    per_ion: float
    four_ion: float
    excited_duration_us: float
    lifetime_us: float


class DressingRecord(Record):
    c_minus: float
    c_plus: float
    autler_townes_splitting_mhz: float
    omega_l_mhz: float
    omega_minus_mhz: float
    omega_plus_mhz: float
    zero_polarizability_mixing: float
    dressed_polarizability_minus: float
    pi_pulse_us: float
    pi_pulse_transfer: float
    reduced_model_max_deviation: float
    ramp_hold_time_ns: float
    ramp_transfer_time_ns: Optional[float] = None
    ramp_p_population_at_hold: float
    ramp_final_p_population: float
    slow_ramp_transfer_time_ns: Optional[float] = None
    slow_ramp_final_p_population: float


class ReproductionSummary(Record):
    version: str
    units: UnitsRecord
    equilibrium: EquilibriumRecord
    localization: List[LocalizationRecord]
    gates: List[GateRecord]
    delays: List[DelayRecord]
    bogoliubov: BogoliubovRecord
    decay: DecayRecord
    dressing: DressingRecord
    artifacts: List[str] = Field(default_factory=list)
