"""
SVG heatmaps of mode amplitudes: row = mode index, column = ion index.
"""

from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import Normalize  # noqa: E402

from physics.errors import ParameterValidationError  # noqa: E402

SVG_HASH_SALT = "ion-chain-modes"


def _checked_matrix(matrix) -> np.ndarray:
    values = np.asarray(matrix, dtype=float)
    if values.ndim != 2 or values.size == 0:
        raise ParameterValidationError(
            "Heatmap needs a non-empty 2-D matrix",
            details={"shape": list(values.shape)},
        )
    if not np.all(np.isfinite(values)):
        raise ParameterValidationError("Heatmap entries must be finite")
    return values


def _normalization(values: np.ndarray) -> Normalize:
    """Linear scale from 0 to the largest entry (1 for an all-zero matrix)"""
    top = float(values.max())
    return Normalize(vmin=0.0, vmax=top if top > 0 else 1.0, clip=True)


def heatmap_colors(matrix, cmap: str = "viridis") -> np.ndarray:
    """RGBA colour of every cell as drawn by ``emit_heatmap``"""
    values = _checked_matrix(matrix)
    return matplotlib.colormaps[cmap](_normalization(values)(values))


def emit_heatmap(
    matrix,
    path: Union[str, Path],
    xlabel: str = "ion index",
    ylabel: str = "mode index",
    cmap: str = "viridis",
    title: Optional[str] = None,
) -> Path:
    values = _checked_matrix(matrix)
    rows, columns = values.shape
    path = Path(path)

    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.0, 5.0))
        try:
            image = ax.imshow(
                values,
                cmap=cmap,
                norm=_normalization(values),
                origin="lower",
                aspect="auto",
                interpolation="nearest",
                extent=(0.5, columns + 0.5, 0.5, rows + 0.5),
            )
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            if title:
                ax.set_title(title)
            fig.colorbar(image, ax=ax)
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return path
