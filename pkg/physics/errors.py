"""
Exception hierarchy for the simulation core.

Every error carries the CLI exit code it maps to and a ``details`` dict that
ends up in the machine-readable error JSON.
"""

from typing import Any, Dict, Optional


class SimulationError(Exception):
    """Base class for all simulation failures"""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": self.details,
        }


class ParameterValidationError(SimulationError, ValueError):
    """Inputs violate a physical or structural precondition"""

    exit_code = 2


class UnstableTrapError(ParameterValidationError):
    """Radial confinement would be lost for the requested polarizability"""


class SingularityError(ParameterValidationError):
    """Two ions share a position"""


class StepControlError(ParameterValidationError):
    """Fixed integration step exceeds the stability bound"""


class NoZeroCrossingError(ParameterValidationError):
    """Dressed polarizability cannot be nulled for the given pair"""


class DimensionMismatchError(ParameterValidationError):
    """Arrays that must describe the same chain disagree in size"""


class ConvergenceError(SimulationError, RuntimeError):
    """An iterative or consistency requirement failed"""

    exit_code = 3

    def __init__(
        self,
        message: str,
        residual: Optional[float] = None,
        iterations: Optional[int] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        merged = dict(details or {})
        if residual is not None:
            merged["residual"] = residual
        if iterations is not None:
            merged["iterations"] = iterations
        super().__init__(message, merged)
        self.residual = residual
        self.iterations = iterations


class StructuralInstabilityError(ConvergenceError):
    """A transverse mode has negative curvature"""

    def __init__(self, message: str, mode: int, eigenvalue: float):
        super().__init__(message, details={"mode": mode, "eigenvalue": eigenvalue})
        self.mode = mode
        self.eigenvalue = eigenvalue


class DegenerateDriveError(ConvergenceError):
    """Unit-amplitude phase vanishes, so no amplitude reaches the target"""


class ConsistencyError(ConvergenceError):
    """A quantity that must be real or normalised is not"""


class ArtifactError(SimulationError, OSError):
    """Result files could not be written"""

    exit_code = 4
