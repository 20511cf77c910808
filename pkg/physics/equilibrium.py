"""
Axial equilibrium of a linear chain in the scaled quartic potential.

The scaled energy, in units of Mω_s²l_s², is

    u = Σ_m (−z_m²/2 + k4 z_m⁴/4) + Σ_{m<n} 1/|z_m − z_n|

which is the axial part of the potential whose transverse curvature is the
mode Hessian built in ``normal_modes``.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
import structlog
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import ConvergenceError, ParameterValidationError, SingularityError

logger = structlog.get_logger(__name__)

ARMIJO_FRACTION = 1e-4
MAX_HALVINGS = 60


@dataclass
class ChainConfiguration:
    """Sorted equilibrium positions in units of l_s"""

    positions: np.ndarray
    k4: float
    iterations: int = 0
    residual: float = 0.0
    energy_history: List[float] = field(default_factory=list)

    @property
    def ion_count(self) -> int:
        return int(self.positions.size)

    @property
    def energy(self) -> float:
        return scaled_axial_energy_gradient(self.positions, self.k4)[0]

    def validate(self) -> List[str]:
        issues = []
        if self.positions.ndim != 1 or self.positions.size == 0:
            issues.append("positions must be a non-empty vector")
        elif np.any(np.diff(self.positions) <= 0):
            issues.append("positions must be strictly increasing")
        if not self.k4 > 0:
            issues.append("k4 must be positive")
        return issues


@dataclass(frozen=True)
class SpacingStatistics:
    mean_spacing: float
    relative_std: float
    min_spacing: float
    max_spacing: float


def _pairwise(positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    diff = positions[:, None] - positions[None, :]
    off_diagonal = ~np.eye(positions.size, dtype=bool)
    if np.any(diff[off_diagonal] == 0):
        raise SingularityError(
            "Coincident ion positions",
            details={"positions": positions.tolist()},
        )
    return diff, off_diagonal


def scaled_axial_energy_gradient(positions, k4: float) -> Tuple[float, np.ndarray]:
    """Scaled energy and its gradient with respect to every position"""
    z = np.asarray(positions, dtype=float)
    diff, off = _pairwise(z)

    inverse = np.zeros_like(diff)
    inverse[off] = 1.0 / np.abs(diff[off])
    energy = np.sum(-0.5 * z**2 + 0.25 * k4 * z**4) + 0.5 * inverse.sum()

    pull = np.zeros_like(diff)
    pull[off] = np.sign(diff[off]) / diff[off] ** 2
    gradient = -z + k4 * z**3 - pull.sum(axis=1)
    return float(energy), gradient


def axial_hessian(positions, k4: float) -> np.ndarray:
    z = np.asarray(positions, dtype=float)
    diff, off = _pairwise(z)

    cubed = np.zeros_like(diff)
    cubed[off] = 2.0 / np.abs(diff[off]) ** 3
    hessian = -cubed
    np.fill_diagonal(hessian, -1.0 + 3.0 * k4 * z**2 + cubed.sum(axis=1))
    return hessian


def initial_positions(ion_count: int, k4: float) -> np.ndarray:
    """Uniform guess spanning the single-ion turning points ±√(2/k4)"""
    if ion_count == 1:
        return np.zeros(1)
    half_width = math.sqrt(2.0 / k4)
    return np.linspace(-half_width, half_width, ion_count)


def _is_ordered(z: np.ndarray) -> bool:
    return z.size < 2 or bool(np.all(np.diff(z) > 0))


def _newton_direction(z: np.ndarray, k4: float, gradient: np.ndarray) -> Optional[np.ndarray]:
    try:
        factor = cho_factor(axial_hessian(z, k4))
    except LinAlgError:
        return None
    return -cho_solve(factor, gradient)


def _backtrack(z, energy, gradient, direction, k4):
    """Armijo backtracking restricted to ordered configurations"""
    slope = float(direction @ gradient)
    if not slope < 0:
        return None

    slack = 64 * np.finfo(float).eps * (1.0 + abs(energy))
    step = 1.0
    for _ in range(MAX_HALVINGS):
        trial = z + step * direction
        if _is_ordered(trial):
            trial_energy, trial_gradient = scaled_axial_energy_gradient(trial, k4)
            if trial_energy <= energy + ARMIJO_FRACTION * step * slope + slack:
                return trial, trial_energy, trial_gradient
        step *= 0.5
    return None


def solve_equilibrium(
    ion_count: int,
    k4: float,
    initial_guess=None,
    tolerance: float = 1e-10,
    max_iterations: int = 500,
) -> ChainConfiguration:
    """
    Damped Newton minimisation of the scaled energy.

    Steps that would reorder the ions are shortened until the ordering holds;
    when the Hessian is not positive definite or the Newton step cannot be
    accepted, a steepest-descent step is used instead.
    """
    if ion_count < 1:
        raise ParameterValidationError("At least one ion is required", details={"ion_count": ion_count})
    if not k4 > 0:
        raise ParameterValidationError("k4 must be positive", details={"k4": k4})

    if initial_guess is None:
        z = initial_positions(ion_count, k4)
    else:
        z = np.sort(np.asarray(initial_guess, dtype=float))
        if z.size != ion_count:
            raise ParameterValidationError(
                "Initial guess length does not match the ion count",
                details={"expected": ion_count, "received": int(z.size)},
            )

    energy, gradient = scaled_axial_energy_gradient(z, k4)
    history = [energy]
    residual = float(np.max(np.abs(gradient)))
    iterations = 0

    while residual >= tolerance:
        if iterations >= max_iterations:
            raise ConvergenceError(
                "Equilibrium solver hit the iteration cap",
                residual=residual,
                iterations=iterations,
            )

        accepted = None
        newton = _newton_direction(z, k4, gradient)
        if newton is not None:
            accepted = _backtrack(z, energy, gradient, newton, k4)
        if accepted is None:
            accepted = _backtrack(z, energy, gradient, -gradient, k4)
        if accepted is None:
            raise ConvergenceError(
                "Line search stalled before reaching the gradient tolerance",
                residual=residual,
                iterations=iterations,
            )

        z, energy, gradient = accepted
        history.append(energy)
        residual = float(np.max(np.abs(gradient)))
        iterations += 1

    if ion_count > 1:
        lowest = float(np.linalg.eigvalsh(axial_hessian(z, k4))[0])
        if lowest < 0:
            logger.warning("Equilibrium has negative axial curvature", lowest_eigenvalue=lowest)

    logger.info(
        "Equilibrium solved",
        ions=ion_count,
        k4=k4,
        iterations=iterations,
        residual=residual,
    )
    return ChainConfiguration(
        positions=z,
        k4=float(k4),
        iterations=iterations,
        residual=residual,
        energy_history=history,
    )


def spacing_statistics(config: ChainConfiguration, central_fraction: float = 0.5) -> SpacingStatistics:
    """Nearest-neighbour gap statistics over the central ⌈fraction·N⌉ ions"""
    n = config.ion_count
    if n < 2:
        raise ParameterValidationError("Spacing statistics need at least two ions", details={"ion_count": n})
    if not 0 < central_fraction <= 1:
        raise ParameterValidationError(
            "central_fraction must lie in (0, 1]",
            details={"central_fraction": central_fraction},
        )

    count = max(2, math.ceil(round(central_fraction * n, 9)))
    start = (n - count) // 2
    gaps = np.diff(config.positions[start:start + count])
    mean = float(gaps.mean())
    return SpacingStatistics(
        mean_spacing=mean,
        relative_std=float(gaps.std() / mean),
        min_spacing=float(gaps.min()),
        max_spacing=float(gaps.max()),
    )


def positions_frame(config: ChainConfiguration) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "index": np.arange(1, config.ion_count + 1),
            "z_scaled": config.positions.astype(float),
        }
    )
