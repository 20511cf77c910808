"""
Artifact persistence for the simulator: output directory, CSV/JSON files and SVG heatmaps.
"""

from .artifacts import ArtifactStore
from .heatmap import emit_heatmap, heatmap_colors
from .records import (
    BogoliubovRecord,
    DecayRecord,
    DelayRecord,
    DressingRecord,
    EquilibriumRecord,
    GateRecord,
    LocalizationRecord,
    ReproductionSummary,
    UnitsRecord,
)

__all__ = [
    'ArtifactStore',
    'emit_heatmap',
    'heatmap_colors',
    'BogoliubovRecord',
    'DecayRecord',
    'DelayRecord',
    'DressingRecord',
    'EquilibriumRecord',
    'GateRecord',
    'LocalizationRecord',
    'ReproductionSummary',
    'UnitsRecord'
]
