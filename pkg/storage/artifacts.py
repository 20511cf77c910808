"""
Output directory management for simulation artifacts.
"""

import json
import math
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel

from physics.errors import ArtifactError

from .heatmap import emit_heatmap

logger = structlog.get_logger(__name__)


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null"""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="python"))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


class ArtifactStore:
    """Owns one output directory and keeps track of everything written into it"""

    def __init__(self, settings: Any, out_dir: Optional[Union[str, Path]] = None):
        self.settings = settings
        self.root = Path(out_dir if out_dir is not None else settings.OUTPUT_DIR)
        self.written: List[Path] = []
        self.initialized = False
        self.created_at: Optional[datetime] = None

    def initialize(self) -> None:
        """Create the output directory"""
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            self.initialized = True
            self.created_at = datetime.now()
            logger.info("Artifact directory ready", path=str(self.root))
        except OSError as e:
            logger.error("Failed to create artifact directory", path=str(self.root), error=str(e), exc_info=True)
            raise ArtifactError(
                f"Cannot create output directory {self.root}",
                details={"path": str(self.root), "reason": str(e)},
            ) from e

    def subdirectory(self, name: str) -> "ArtifactStore":
        """Store rooted at ``root/name`` that records into the same ledger"""
        child = ArtifactStore(self.settings, self.root / name)
        child.written = self.written
        child.initialize()
        return child

    def path_for(self, name: str) -> Path:
        if not self.initialized:
            self.initialize()
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_csv(self, frame: pd.DataFrame, name: str) -> Path:
        path = self.path_for(name)
        try:
            frame.to_csv(path, index=False)
        except OSError as e:
            self._fail(path, e)
        return self._record(path, rows=len(frame))

    def write_json(self, payload: Any, name: str) -> Path:
        path = self.path_for(name)
        text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)
        try:
            path.write_text(text + "\n", encoding="utf-8")
        except OSError as e:
            self._fail(path, e)
        return self._record(path)

    def write_heatmap(self, matrix, name: str, xlabel: str, ylabel: str, title: Optional[str] = None) -> Path:
        path = self.path_for(name)
        try:
            emit_heatmap(matrix, path, xlabel=xlabel, ylabel=ylabel, cmap=self.settings.HEATMAP_COLORMAP, title=title)
        except OSError as e:
            self._fail(path, e)
        return self._record(path)

    def relative(self, path: Path) -> str:
        try:
            return path.relative_to(self.root).as_posix()
        except ValueError:
            return str(path)

    def get_stats(self) -> Dict[str, Any]:
        """Files written so far, grouped by type"""
        by_type: Dict[str, int] = {}
        for path in self.written:
            suffix = path.suffix.lstrip(".") or "other"
            by_type[suffix] = by_type.get(suffix, 0) + 1
        return {
            "root": str(self.root),
            "files": len(self.written),
            "by_type": by_type,
        }

    def _record(self, path: Path, **fields: Any) -> Path:
        if path not in self.written:
            self.written.append(path)
        logger.debug("Artifact written", path=str(path), **fields)
        return path

    def _fail(self, path: Path, error: OSError) -> None:
        logger.error("Failed to write artifact", path=str(path), error=str(error), exc_info=True)
        raise ArtifactError(
            f"Cannot write {path}",
            details={"path": str(path), "reason": str(error)},
        ) from error
