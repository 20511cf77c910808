"""
Scenario description: which chain, which ions are excited, which gates run.

User-facing ion and mode indices are 1-based; the ``*_indices`` helpers return
0-based values for the physics layer.
"""

import json
import math
import os
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from physics.errors import ParameterValidationError
from physics.gate_dynamics import GateCoupling, PulseShape
from physics.gate_protocol import ModeSet
from physics.rydberg_excitation import SWEEP_DIVISOR, DressedSystem
from physics.trap_units import PhysicalConstants, ScaledUnits, StateFrequencies, TrapParameters

TWO_PI = 2 * math.pi


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSpec(StrictModel):
    start: float
    stop: float
    num: int = Field(ge=1)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


class PulseConfig(StrictModel):
    shape: PulseShape = PulseShape.SINE
    duration_bus_periods: float = Field(default=8.0, gt=0, description="Gate time τ in bus periods")
    nu_grid: GridSpec = Field(
        default_factory=lambda: GridSpec(start=0.5, stop=10.45, num=200),
        description="ν in units of 2π/τ",
    )
    delay_grid: GridSpec = Field(
        default_factory=lambda: GridSpec(start=0.0, stop=4.0, num=20),
        description="Start delay of the second gate in bus periods",
    )
    delay_scan_nu_grid: GridSpec = Field(
        default_factory=lambda: GridSpec(start=0.5, stop=10.45, num=100),
        description="ν grid optimised over at every delay",
    )


class ThermalConfig(StrictModel):
    reference_mode: Union[Literal["highest_bare"], int] = "highest_bare"
    mean_occupation: float = Field(default=3.25, gt=0)


class CouplingConfig(StrictModel):
    eta_ref: float = Field(default=0.1, gt=0, description="Lamb-Dicke parameter at omega_ref")
    wavenumber: Optional[float] = Field(
        default=None, gt=0, description="Gate-laser wavenumber (rad/m); replaces eta_ref when set"
    )
    omega_ref: Optional[float] = Field(default=None, gt=0, description="Reference frequency, defaults to omega_ell")
    ion_scale: Dict[int, float] = Field(default_factory=dict, description="Per-ion η scale, 1-based keys")


class TrapConfig(StrictModel):
    rf_gradient: float = Field(default=7.0e8, gt=0, description="α (V/m²)")
    rf_frequency: float = Field(default=TWO_PI * 25.2e6, gt=0, description="Ω (rad/s)")
    quadratic_coefficient: float = Field(default=-2.09e3, lt=0, description="β2 (V/m²)")
    rydberg_lifetime: float = Field(default=270e-6, gt=0, description="Rydberg lifetime (s)")
    excited_duration: float = Field(default=4.9e-6, ge=0, description="Time each ion spends excited (s)")

    def parameters(self, quartic_coefficient: float = 1.0) -> TrapParameters:
        return TrapParameters(
            rf_gradient=self.rf_gradient,
            rf_frequency=self.rf_frequency,
            quadratic_coefficient=self.quadratic_coefficient,
            quartic_coefficient=quartic_coefficient,
        )


class DressingConfig(StrictModel):
    delta_s_mhz: float = 136.074
    delta_p_mhz: float = 293.957
    omega_mw_mhz: float = Field(default=400.0, gt=0)
    omega_minus_mhz: float = Field(default=1.0, gt=0)
    pi_pulse_us: Optional[float] = Field(default=None, gt=0, description="Defaults to π/Ω_−")
    sweep_divisor: float = Field(default=SWEEP_DIVISOR, gt=0)
    ramp_duration_ns: float = Field(default=20.0, gt=0)
    slow_ramp_duration_ns: float = Field(default=30.0, gt=0)
    ramp_cutoff: float = Field(default=20.0, gt=0, description="Hold once |Δ_SP| reaches this multiple of Ω_MW")
    principal_number: int = Field(default=50, ge=1)
    s_to_p_polarizability_ratio: float = Field(default=0.4624, gt=0)

    def system(self) -> DressedSystem:
        return DressedSystem(
            delta_s=TWO_PI * self.delta_s_mhz * 1e6,
            delta_p=TWO_PI * self.delta_p_mhz * 1e6,
            omega_mw=TWO_PI * self.omega_mw_mhz * 1e6,
        )

    @property
    def omega_minus(self) -> float:
        return TWO_PI * self.omega_minus_mhz * 1e6

    @property
    def pi_pulse_duration(self) -> float:
        return self.pi_pulse_us * 1e-6 if self.pi_pulse_us is not None else math.pi / self.omega_minus

    @property
    def sweep_rate(self) -> float:
        return TWO_PI * self.omega_mw_mhz * 1e6 / self.sweep_divisor


class ScenarioConfig(StrictModel):
    name: str = "custom"
    ion_count: int = Field(default=100, ge=1)
    k4: float = Field(default=1.343, gt=0)
    omega_ell: float = Field(default=150.0, gt=0, description="ω_ELL/ω_s")
    omega_ryd: float = Field(default=198.5, gt=0, description="ω_Ryd/ω_s")
    rydberg_ions: List[int] = Field(default_factory=list, description="1-based")
    gate_pairs: List[Tuple[int, int]] = Field(default_factory=list, description="1-based")
    subcrystals: Optional[List[List[int]]] = Field(default=None, description="1-based, derived when omitted")
    localization_threshold: float = Field(default=0.95, gt=0, le=1)
    pulse: PulseConfig = Field(default_factory=PulseConfig)
    thermal: ThermalConfig = Field(default_factory=ThermalConfig)
    coupling: CouplingConfig = Field(default_factory=CouplingConfig)
    trap: TrapConfig = Field(default_factory=TrapConfig)
    dressing: DressingConfig = Field(default_factory=DressingConfig)
    mode_set: ModeSet = ModeSet.ALL
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def check_indices(self) -> "ScenarioConfig":
        issues = self.validate_scenario()
        if issues:
            raise ValueError("; ".join(issues))
        return self

    def validate_scenario(self) -> List[str]:
        """Cross-field checks, reported as a list of issues"""
        issues = []
        n = self.ion_count

        def outside(indices):
            return sorted(i for i in indices if not 1 <= i <= n)

        if outside(self.rydberg_ions):
            issues.append(f"rydberg_ions {outside(self.rydberg_ions)} outside 1..{n}")
        if len(set(self.rydberg_ions)) != len(self.rydberg_ions):
            issues.append("rydberg_ions contains duplicates")

        gate_ions = [i for pair in self.gate_pairs for i in pair]
        if outside(gate_ions):
            issues.append(f"gate ions {outside(gate_ions)} outside 1..{n}")
        if len(set(gate_ions)) != len(gate_ions):
            issues.append("gate pairs must be disjoint")
        if set(gate_ions) & set(self.rydberg_ions):
            issues.append("gate ions must be in ELL states")

        if self.subcrystals is not None:
            for host in self.subcrystals:
                if not host or outside(host):
                    issues.append(f"sub-crystal {host} is empty or outside 1..{n}")

        for label in self.coupling.ion_scale:
            if not 1 <= label <= n:
                issues.append(f"coupling.ion_scale key {label} outside 1..{n}")

        if isinstance(self.thermal.reference_mode, int) and not 1 <= self.thermal.reference_mode <= n:
            issues.append(f"thermal.reference_mode outside 1..{n}")

        if self.omega_ryd < self.omega_ell:
            issues.append("omega_ryd must not be smaller than omega_ell")
        return issues

    def rydberg_indices(self) -> List[int]:
        return [i - 1 for i in self.rydberg_ions]

    def pair_indices(self) -> List[Tuple[int, int]]:
        return [(m - 1, n - 1) for m, n in self.gate_pairs]

    def subcrystal_indices(self) -> Optional[List[List[int]]]:
        if self.subcrystals is None:
            return None
        return [[i - 1 for i in host] for host in self.subcrystals]

    def thermal_reference_index(self) -> Optional[int]:
        reference = self.thermal.reference_mode
        return None if reference == "highest_bare" else int(reference) - 1

    def state_frequencies(self) -> StateFrequencies:
        return StateFrequencies(omega_ell=self.omega_ell, omega_ryd=self.omega_ryd)

    def gate_coupling(self, units: Optional[ScaledUnits] = None) -> GateCoupling:
        """η from eta_ref, or from the laser wavenumber when one is configured (needs ``units``)"""
        omega_ref = self.coupling.omega_ref or self.omega_ell
        ion_scale = {label - 1: value for label, value in self.coupling.ion_scale.items()}
        if self.coupling.wavenumber is None:
            return GateCoupling(eta_ref=self.coupling.eta_ref, omega_ref=omega_ref, ion_scale=ion_scale)
        if units is None:
            raise ParameterValidationError(
                "A wavenumber coupling needs the trap units", details={"scenario": self.name}
            )
        return GateCoupling.from_wavenumber(
            self.coupling.wavenumber, units, PhysicalConstants.calcium_40(), omega_ref=omega_ref, ion_scale=ion_scale
        )


PRESETS: Dict[str, dict] = {
    "bare-chain": {"name": "bare-chain"},
    "two-rydberg": {"name": "two-rydberg", "rydberg_ions": [45, 56]},
    "four-rydberg": {
        "name": "four-rydberg",
        "rydberg_ions": [45, 48, 53, 56],
        "gate_pairs": [(46, 47), (54, 55)],
    },
}


def get_preset(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise ParameterValidationError(
            f"Unknown preset {name!r}",
            details={"available": sorted(PRESETS)},
        )
    return ScenarioConfig(**PRESETS[name])


def load_scenario_from_file(file_path: str) -> ScenarioConfig:
    """Load a scenario from a JSON or YAML file"""
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Scenario file not found: {file_path}")

    with open(file_path, "r") as f:
        if file_path.endswith(".json"):
            data = json.load(f)
        elif file_path.endswith((".yml", ".yaml")):
            data = yaml.safe_load(f)
        else:
            raise ParameterValidationError(
                "Scenario file must be JSON or YAML", details={"path": file_path}
            )

    data = data or {}
    if "preset" in data:
        base = PRESETS.get(data.pop("preset"))
        if base is None:
            raise ParameterValidationError("Unknown preset in scenario file", details={"available": sorted(PRESETS)})
        data = {**base, **data}
    return ScenarioConfig(**data)
