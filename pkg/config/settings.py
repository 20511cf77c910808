"""
Runtime settings for the ion-chain mode-shaping simulator.

Physics inputs live in scenario files (see ``config.scenario``); this module
only holds knobs that change how a run is executed, not what it computes.
"""

import math
from typing import List, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings with environment variable support"""

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", case_sensitive=True)

    # Application Info
    VERSION: str = "1.0.0"
    APP_NAME: str = "Rydberg Mode-Shaping Simulator"
    LOG_LEVEL: str = Field(default="INFO", description="Logging level")
    LOG_FORMAT: str = Field(default="console", description="Log renderer: console or json")

    # Execution
    DEFAULT_THREADS: int = Field(default=1, description="Worker threads for parameter sweeps")
    OUTPUT_DIR: str = Field(default="out", description="Default artifact directory")

    # Equilibrium solver
    EQUILIBRIUM_TOLERANCE: float = Field(default=1e-10, description="Max-norm gradient tolerance")
    EQUILIBRIUM_MAX_ITERATIONS: int = Field(default=500, description="Newton iteration cap")

    # Gate dynamics quadrature
    QUADRATURE_NODES: int = Field(default=20, description="Gauss-Legendre nodes per sub-segment")
    QUADRATURE_MAX_PHASE: float = Field(default=math.pi, description="Max accumulated phase per sub-segment (rad)")

    # Three-level dynamics
    RK4_STEPS_PER_PERIOD: int = Field(default=100, description="RK4 steps per fastest period")
    TRAJECTORY_SAMPLES: int = Field(default=501, description="Samples stored per trajectory")

    # Plotting
    HEATMAP_COLORMAP: str = Field(default="viridis", description="Matplotlib colormap for mode heatmaps")

    def validate_settings(self) -> List[str]:
        """Validate settings and return list of issues"""
        issues = []

        if self.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            issues.append(f"LOG_LEVEL {self.LOG_LEVEL!r} is not a logging level")
        if self.LOG_FORMAT not in ("console", "json"):
            issues.append("LOG_FORMAT must be 'console' or 'json'")

        if self.DEFAULT_THREADS < 1:
            issues.append("DEFAULT_THREADS must be at least 1")

        if not 0 < self.EQUILIBRIUM_TOLERANCE < 1e-6:
            issues.append("EQUILIBRIUM_TOLERANCE must lie in (0, 1e-6)")
        if self.EQUILIBRIUM_MAX_ITERATIONS < 1:
            issues.append("EQUILIBRIUM_MAX_ITERATIONS must be positive")

        if self.QUADRATURE_NODES < 4:
            issues.append("QUADRATURE_NODES must be at least 4")
        if not 0 < self.QUADRATURE_MAX_PHASE <= 2 * math.pi:
            issues.append("QUADRATURE_MAX_PHASE must lie in (0, 2π]")

        # below 50 steps per period RK4 is outside its documented accuracy
        if self.RK4_STEPS_PER_PERIOD < 50:
            issues.append("RK4_STEPS_PER_PERIOD must be at least 50")
        if self.TRAJECTORY_SAMPLES < 2:
            issues.append("TRAJECTORY_SAMPLES must be at least 2")

        return issues


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get the global settings instance"""
    return settings


def validate_configuration(target: Optional[Settings] = None) -> None:
    """Validate the configuration and raise exception if invalid"""
    issues = (target or settings).validate_settings()
    if issues:
        raise ValueError("Configuration validation failed:\n" + "\n".join(f"- {issue}" for issue in issues))


class TestingSettings(Settings):
    """Testing environment settings"""

    LOG_LEVEL: str = "WARNING"
    TRAJECTORY_SAMPLES: int = 101
