"""
State-dependent transverse (x) modes of the chain.

Each ion carries its own radial trap frequency, ω_ELL or ω_Ryd, depending on
its electronic state. The Hessian in units of Mω_s² is

    H_mm = (ω_m/ω_s)² + 1/2 − (3k4/2) z_m² − Σ_{k≠m} 1/|z_k − z_m|³
    H_mn = 1/|z_m − z_n|³

and its eigenvectors are stored as columns, ordered by ascending frequency,
with the largest-magnitude entry of every column made positive.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog

from .equilibrium import ChainConfiguration
from .errors import (
    DimensionMismatchError,
    ParameterValidationError,
    SingularityError,
    StructuralInstabilityError,
)
from .trap_units import StateFrequencies

logger = structlog.get_logger(__name__)


class ElectronicState(Enum):
    ELL = "ell"
    RYDBERG = "rydberg"


@dataclass(frozen=True)
class ElectronicAssignment:
    states: Tuple[ElectronicState, ...]
    frequencies: StateFrequencies

    @classmethod
    def all_ell(cls, ion_count: int, frequencies: StateFrequencies) -> "ElectronicAssignment":
        return cls(states=(ElectronicState.ELL,) * ion_count, frequencies=frequencies)

    @classmethod
    def from_rydberg_ions(
        cls, ion_count: int, rydberg_ions: Iterable[int], frequencies: StateFrequencies
    ) -> "ElectronicAssignment":
        """Build from 0-based Rydberg ion indices"""
        rydberg = set(int(i) for i in rydberg_ions)
        outside = [i for i in rydberg if not 0 <= i < ion_count]
        if outside:
            raise ParameterValidationError(
                "Rydberg ion index outside the chain",
                details={"indices": sorted(outside), "ion_count": ion_count},
            )
        states = tuple(
            ElectronicState.RYDBERG if m in rydberg else ElectronicState.ELL for m in range(ion_count)
        )
        return cls(states=states, frequencies=frequencies)

    @property
    def ion_count(self) -> int:
        return len(self.states)

    @property
    def rydberg_ions(self) -> List[int]:
        return [m for m, s in enumerate(self.states) if s is ElectronicState.RYDBERG]

    def trap_frequencies(self) -> np.ndarray:
        lookup = {
            ElectronicState.ELL: self.frequencies.omega_ell,
            ElectronicState.RYDBERG: self.frequencies.omega_ryd,
        }
        return np.array([lookup[s] for s in self.states], dtype=float)


@dataclass
class ModeDecomposition:
    """Eigenfrequencies (units of ω_s, ascending) and eigenvectors as columns"""

    frequencies: np.ndarray
    vectors: np.ndarray
    hessian: np.ndarray

    @property
    def mode_count(self) -> int:
        return int(self.frequencies.size)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.frequencies**2

    def amplitude_matrix(self) -> np.ndarray:
        """|B| with one row per mode and one column per ion"""
        return np.abs(self.vectors.T)

    def residuals(self) -> np.ndarray:
        return np.linalg.norm(self.hessian @ self.vectors - self.vectors * self.eigenvalues, axis=0)

    def orthonormality_error(self) -> float:
        return float(np.max(np.abs(self.vectors.T @ self.vectors - np.eye(self.mode_count))))

    def with_flipped_mode(self, mode: int) -> "ModeDecomposition":
        vectors = self.vectors.copy()
        vectors[:, mode] *= -1
        return ModeDecomposition(self.frequencies.copy(), vectors, self.hessian)


def build_hessian(config: ChainConfiguration, assignment: ElectronicAssignment) -> np.ndarray:
    z = np.asarray(config.positions, dtype=float)
    if assignment.ion_count != z.size:
        raise DimensionMismatchError(
            "Assignment and chain have different ion counts",
            details={"positions": int(z.size), "assignment": assignment.ion_count},
        )

    diff = z[:, None] - z[None, :]
    off = ~np.eye(z.size, dtype=bool)
    if np.any(diff[off] == 0):
        raise SingularityError("Coincident ion positions", details={"positions": z.tolist()})

    coupling = np.zeros_like(diff)
    coupling[off] = 1.0 / np.abs(diff[off]) ** 3

    hessian = coupling.copy()
    diagonal = assignment.trap_frequencies() ** 2 + 0.5 - 1.5 * config.k4 * z**2 - coupling.sum(axis=1)
    np.fill_diagonal(hessian, diagonal)
    return hessian


def diagonalize(hessian) -> ModeDecomposition:
    matrix = np.asarray(hessian, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError("Hessian must be square", details={"shape": list(matrix.shape)})

    eigenvalues, vectors = np.linalg.eigh(matrix)
    if eigenvalues[0] < 0:
        raise StructuralInstabilityError(
            f"Transverse mode {int(np.argmin(eigenvalues))} has negative curvature",
            mode=int(np.argmin(eigenvalues)),
            eigenvalue=float(eigenvalues[0]),
        )

    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors = vectors * signs

    return ModeDecomposition(frequencies=np.sqrt(eigenvalues), vectors=vectors, hessian=matrix)


def localization_weights(modes: ModeDecomposition, subcrystal: Sequence[int]) -> np.ndarray:
    indices = _checked_indices(subcrystal, modes.vectors.shape[0])
    return np.sum(modes.vectors[indices, :] ** 2, axis=0)


def localized_mode_analysis(
    modes: ModeDecomposition, subcrystal: Sequence[int], weight_threshold: float = 0.95
) -> Tuple[List[int], np.ndarray]:
    """Modes whose weight on the sub-crystal reaches the threshold, by frequency"""
    weights = localization_weights(modes, subcrystal)
    selected = [int(j) for j in np.flatnonzero(weights >= weight_threshold)]
    selected.sort(key=lambda j: modes.frequencies[j])
    return selected, weights[selected]


def dominant_modes(modes: ModeDecomposition, subcrystal: Sequence[int]) -> List[int]:
    """The |subcrystal| modes carrying the most weight, by frequency"""
    weights = localization_weights(modes, subcrystal)
    ranked = np.argsort(-weights, kind="stable")[: len(subcrystal)]
    return sorted((int(j) for j in ranked), key=lambda j: modes.frequencies[j])


def bus_mode(modes: ModeDecomposition, subcrystal: Sequence[int]) -> int:
    return dominant_modes(modes, subcrystal)[-1]


def assign_bus_modes(
    modes: ModeDecomposition, hosts: Sequence[Sequence[int]], candidates: Sequence[int]
) -> List[int]:
    """
    One distinct bus mode per host, taken from ``candidates``.

    Each host, in order, claims the free candidate closest in frequency to its
    own highest dominant mode. Identical hosts related by mirror symmetry share
    that mode, so the second one gets its partner.
    """
    free = [int(j) for j in candidates]
    if len(free) < len(hosts):
        raise ParameterValidationError(
            "Fewer candidate modes than sub-crystals",
            details={"candidates": len(free), "subcrystals": len(hosts)},
        )
    assigned = []
    for host in hosts:
        target = modes.frequencies[bus_mode(modes, host)]
        choice = min(free, key=lambda j: (abs(modes.frequencies[j] - target), -modes.frequencies[j]))
        free.remove(choice)
        assigned.append(choice)
    return assigned


def truncated_subcrystal_modes(
    config: ChainConfiguration, assignment: ElectronicAssignment, subcrystal: Sequence[int]
) -> ModeDecomposition:
    """Modes of the sub-crystal with spectators pinned (full Coulomb sums kept)"""
    indices = _checked_indices(subcrystal, config.ion_count)
    if np.any(np.diff(indices) != 1):
        raise ParameterValidationError(
            "Sub-crystal must be contiguous",
            details={"subcrystal": indices.tolist()},
        )
    full = build_hessian(config, assignment)
    return diagonalize(full[np.ix_(indices, indices)])


def truncation_report(
    full: ModeDecomposition, truncated: ModeDecomposition, subcrystal: Sequence[int]
) -> pd.DataFrame:
    """Pairs the dominant full-chain modes of a sub-crystal with the truncated ones"""
    full_modes = dominant_modes(full, subcrystal)
    full_frequencies = np.sort(full.frequencies[full_modes])
    truncated_frequencies = np.sort(truncated.frequencies)
    return pd.DataFrame(
        {
            "mode_index": np.array(full_modes) + 1,
            "full_omega_over_omegas": full_frequencies,
            "truncated_omega_over_omegas": truncated_frequencies,
            "relative_discrepancy": np.abs(truncated_frequencies - full_frequencies) / full_frequencies,
        }
    )


def subcrystals_from_rydberg_ions(ion_count: int, rydberg_ions: Iterable[int]) -> List[List[int]]:
    """Contiguous ELL runs that have a Rydberg ion on both sides (0-based)"""
    bounds = sorted(set(int(i) for i in rydberg_ions))
    runs = []
    for left, right in zip(bounds, bounds[1:]):
        if right - left > 1:
            runs.append(list(range(left + 1, right)))
    return runs


def mode_frame(modes: ModeDecomposition) -> pd.DataFrame:
    """Long-format eigenvector table, 1-based indices"""
    ions, mode_ids = np.meshgrid(
        np.arange(modes.vectors.shape[0]), np.arange(modes.mode_count), indexing="xy"
    )
    return pd.DataFrame(
        {
            "mode_index": mode_ids.ravel() + 1,
            "ion_index": ions.ravel() + 1,
            "amplitude": modes.vectors.T.ravel(),
        }
    )


def frequency_frame(modes: ModeDecomposition) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "mode_index": np.arange(1, modes.mode_count + 1),
            "omega_over_omegas": modes.frequencies,
        }
    )


def localization_frame(modes: ModeDecomposition, subcrystals: Dict[str, Sequence[int]]) -> pd.DataFrame:
    columns = {
        "mode_index": np.arange(1, modes.mode_count + 1),
        "omega_over_omegas": modes.frequencies,
    }
    for label, ions in subcrystals.items():
        columns[f"weight_{label}"] = localization_weights(modes, ions)
    return pd.DataFrame(columns)


def _checked_indices(indices: Sequence[int], size: int) -> np.ndarray:
    array = np.asarray(sorted(int(i) for i in indices), dtype=int)
    if array.size == 0:
        raise ParameterValidationError("Sub-crystal must not be empty")
    if array[0] < 0 or array[-1] >= size:
        raise ParameterValidationError(
            "Sub-crystal index outside the chain",
            details={"subcrystal": array.tolist(), "ion_count": size},
        )
    return array
