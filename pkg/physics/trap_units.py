"""
Physical trap parameters and the dimensionless unit system.

Lengths are measured in l_s, angular frequencies in ω_s and times in 1/ω_s.
Everything downstream of this module works in those units; SI values only
appear when results are reported.
"""

from dataclasses import dataclass
from typing import List

import numpy as np
from scipy import constants

from .errors import ParameterValidationError, UnstableTrapError

CALCIUM_40_MASS_U = 39.962590863


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants and the ion mass (SI)"""

    elementary_charge: float = constants.e
    vacuum_permittivity: float = constants.epsilon_0
    ion_mass: float = CALCIUM_40_MASS_U * constants.atomic_mass - constants.m_e
    reduced_planck: float = constants.hbar
    boltzmann: float = constants.k

    @classmethod
    def calcium_40(cls) -> "PhysicalConstants":
        return cls()

    def validate(self) -> List[str]:
        issues = []
        for name in (
            "elementary_charge",
            "vacuum_permittivity",
            "ion_mass",
            "reduced_planck",
            "boltzmann",
        ):
            if not getattr(self, name) > 0:
                issues.append(f"{name} must be strictly positive")
        return issues


@dataclass(frozen=True)
class TrapParameters:
    """Linear Paul trap with a quartic static potential (SI)"""

    rf_gradient: float = 7.0e8
    rf_frequency: float = 2 * np.pi * 25.2e6
    quadratic_coefficient: float = -2.09e3
    quartic_coefficient: float = 1.0

    def validate(self) -> List[str]:
        issues = []
        if not self.quadratic_coefficient < 0:
            issues.append("quadratic_coefficient (beta2) must be negative")
        if not self.quartic_coefficient > 0:
            issues.append("quartic_coefficient (beta4) must be positive")
        if not self.rf_frequency > 0:
            issues.append("rf_frequency must be positive")
        if not self.rf_gradient > 0:
            issues.append("rf_gradient must be positive")
        return issues


@dataclass(frozen=True)
class ScaledUnits:
    """Length, frequency and quartic scales of the chain"""

    length_scale: float
    frequency_scale: float
    k4: float

    def to_meters(self, scaled_length):
        return np.asarray(scaled_length) * self.length_scale

    def to_micrometers(self, scaled_length):
        return self.to_meters(scaled_length) * 1e6

    def to_rad_per_second(self, scaled_frequency):
        return np.asarray(scaled_frequency) * self.frequency_scale

    def to_megahertz(self, scaled_frequency):
        return self.to_rad_per_second(scaled_frequency) / (2 * np.pi) / 1e6

    def to_seconds(self, scaled_time):
        return np.asarray(scaled_time) / self.frequency_scale

    def to_microseconds(self, scaled_time):
        return self.to_seconds(scaled_time) * 1e6


@dataclass(frozen=True)
class StateFrequencies:
    """Radial trap frequencies of ELL and Rydberg ions, in units of ω_s"""

    omega_ell: float = 150.0
    omega_ryd: float = 198.5

    def validate(self) -> List[str]:
        issues = []
        if not self.omega_ell > 0:
            issues.append("omega_ell must be positive")
        if self.omega_ryd < self.omega_ell:
            issues.append("omega_ryd must not be smaller than omega_ell")
        return issues

    @classmethod
    def from_polarizability_term(cls, omega_ell: float, polarizability_term: float) -> "StateFrequencies":
        return cls(omega_ell=omega_ell, omega_ryd=omega_ell * rydberg_frequency_ratio(polarizability_term))


def _raise_on_issues(issues: List[str], what: str) -> None:
    if issues:
        raise ParameterValidationError(
            f"Invalid {what}: " + "; ".join(issues),
            details={"issues": issues},
        )


def derive_scaled_units(trap: TrapParameters, consts: PhysicalConstants) -> ScaledUnits:
    """l_s = [e/(8π ε0 |β2|)]^(1/3), ω_s = √(2e|β2|/M), k4 = 2β4 l_s²/|β2|"""
    _raise_on_issues(trap.validate() + consts.validate(), "trap parameters")

    beta2 = abs(trap.quadratic_coefficient)
    e = consts.elementary_charge
    length_scale = (e / (8 * np.pi * consts.vacuum_permittivity * beta2)) ** (1.0 / 3.0)
    frequency_scale = np.sqrt(2 * e * beta2 / consts.ion_mass)
    k4 = 2 * trap.quartic_coefficient * length_scale**2 / beta2

    return ScaledUnits(
        length_scale=float(length_scale),
        frequency_scale=float(frequency_scale),
        k4=float(k4),
    )


def quartic_coefficient_for_k4(k4: float, trap: TrapParameters, consts: PhysicalConstants) -> float:
    """β4 (V/m⁴) that realises the requested k4 for the given β2"""
    if not k4 > 0:
        raise ParameterValidationError("k4 must be positive", details={"k4": k4})
    # k4 is linear in β4
    units = derive_scaled_units(trap, consts)
    return float(trap.quartic_coefficient * k4 / units.k4)


def ell_frequency_ratio(trap: TrapParameters, consts: PhysicalConstants) -> float:
    """
    Ponderomotive radial frequency ω_ELL = √2·eα/(MΩ) in units of ω_s.

    The static radial deconfinement from β2 is not included; it enters the
    transverse Hessian separately as the +1/2 on the diagonal.
    """
    _raise_on_issues(trap.validate() + consts.validate(), "trap parameters")
    e = consts.elementary_charge
    omega_ell = np.sqrt(2.0) * e * trap.rf_gradient / (consts.ion_mass * trap.rf_frequency)
    omega_s = np.sqrt(2 * e * abs(trap.quadratic_coefficient) / consts.ion_mass)
    return float(omega_ell / omega_s)


def rydberg_frequency_ratio(polarizability_term: float) -> float:
    """ω_Ryd/ω_ELL = √(1 + term) for the dimensionless polarizability product"""
    if polarizability_term <= -1:
        raise UnstableTrapError(
            "Polarizability term at or below -1 removes radial confinement",
            details={"polarizability_term": polarizability_term},
        )
    return float(np.sqrt(1.0 + polarizability_term))


def polarizability_term_for_ratio(ratio: float) -> float:
    if not ratio > 0:
        raise ParameterValidationError("Frequency ratio must be positive", details={"ratio": ratio})
    return float(ratio**2 - 1.0)
