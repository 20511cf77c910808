"""
Base runner class for the simulator commands.
Every CLI command is implemented by a runner that inherits from this class.
"""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

import structlog

from config.scenario import ScenarioConfig
from physics.equilibrium import ChainConfiguration, solve_equilibrium
from physics.errors import ParameterValidationError
from physics.gate_protocol import GateContext, build_gate_context
from physics.trap_units import PhysicalConstants, ScaledUnits, derive_scaled_units, quartic_coefficient_for_k4
from storage.artifacts import ArtifactStore


class RunnerStatus(Enum):
    """Runner execution status"""
    IDLE = "idle"
    RUNNING = "running"
    COMPLETED = "completed"
    ERROR = "error"


@dataclass
class RunnerMetrics:
    """Runner performance metrics"""
    executions: int = 0
    successful_executions: int = 0
    failed_executions: int = 0
    avg_execution_time: float = 0.0
    last_execution: Optional[datetime] = None
    artifacts_written: int = 0


@dataclass
class RunResult:
    command: str
    status: RunnerStatus
    execution_time: float
    artifacts: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": "ok" if self.status is RunnerStatus.COMPLETED else self.status.value,
            "command": self.command,
            "execution_time": self.execution_time,
            "artifacts": self.artifacts,
            "summary": self.summary,
        }


class BaseRunner(ABC):
    """
    Base class for all command runners.
    Provides logging, metrics and the shared chain/gate setup.
    """

    command: str = ""

    def __init__(self, name: str, settings: Any, store: ArtifactStore):
        self.name = name
        self.settings = settings
        self.store = store
        self.status = RunnerStatus.IDLE
        self.metrics = RunnerMetrics()
        self.n_jobs = settings.DEFAULT_THREADS

        self.logger = structlog.get_logger(runner=name)

    def run(self, scenario: ScenarioConfig) -> RunResult:
        """Execute the runner once and record metrics"""
        self.status = RunnerStatus.RUNNING
        start_time = datetime.now()
        started = time.perf_counter()
        before = len(self.store.written)
        self.logger.info("Runner started", scenario=scenario.name, threads=self.n_jobs)

        try:
            summary = self.execute(scenario)
        except Exception as e:
            self.status = RunnerStatus.ERROR
            self.metrics.executions += 1
            self.metrics.failed_executions += 1
            self.logger.error(
                "Runner execution failed",
                error=str(e),
                exc_info=True
            )
            raise

        execution_time = time.perf_counter() - started
        self.metrics.executions += 1
        self.metrics.successful_executions += 1
        self.metrics.last_execution = start_time
        self.metrics.avg_execution_time = (
            (self.metrics.avg_execution_time * (self.metrics.executions - 1) + execution_time)
            / self.metrics.executions
        )
        new_files = self.store.written[before:]
        self.metrics.artifacts_written += len(new_files)
        self.status = RunnerStatus.COMPLETED

        self.logger.info(
            "Runner execution completed",
            execution_time=execution_time,
            artifacts=len(new_files),
        )
        return RunResult(
            command=self.command or self.name,
            status=self.status,
            execution_time=execution_time,
            artifacts=[self.store.relative(path) for path in new_files],
            summary=summary,
        )

    @abstractmethod
    def execute(self, scenario: ScenarioConfig) -> Dict[str, Any]:
        """
        Main logic of the runner; returns a JSON-ready summary.
        Must be implemented by all subclasses.
        """

    def get_status(self) -> Dict[str, Any]:
        """Get current runner status and metrics"""
        return {
            "name": self.name,
            "command": self.command,
            "status": self.status.value,
            "metrics": {
                "executions": self.metrics.executions,
                "successful_executions": self.metrics.successful_executions,
                "failed_executions": self.metrics.failed_executions,
                "avg_execution_time": self.metrics.avg_execution_time,
                "last_execution": self.metrics.last_execution.isoformat() if self.metrics.last_execution else None,
                "artifacts_written": self.metrics.artifacts_written,
            },
        }

    # Shared setup

    def solve_chain(self, scenario: ScenarioConfig) -> ChainConfiguration:
        return solve_equilibrium(
            scenario.ion_count,
            scenario.k4,
            tolerance=self.settings.EQUILIBRIUM_TOLERANCE,
            max_iterations=self.settings.EQUILIBRIUM_MAX_ITERATIONS,
        )

    def scaled_units(self, scenario: ScenarioConfig) -> ScaledUnits:
        """SI scales of the configured trap, with β4 chosen to reproduce the scenario's k4"""
        consts = PhysicalConstants.calcium_40()
        trap = scenario.trap.parameters()
        quartic = quartic_coefficient_for_k4(scenario.k4, trap, consts)
        return derive_scaled_units(scenario.trap.parameters(quartic), consts)

    def gate_context(
        self, scenario: ScenarioConfig, chain: Optional[ChainConfiguration] = None
    ) -> GateContext:
        if not scenario.gate_pairs:
            raise ParameterValidationError(
                f"Command {self.command!r} needs at least one gate pair",
                details={"scenario": scenario.name},
            )
        if not scenario.rydberg_ions and scenario.subcrystals is None:
            raise ParameterValidationError(
                "Gate pairs need Rydberg ions or explicit sub-crystals to define their bus modes",
                details={"scenario": scenario.name},
            )
        chain = chain if chain is not None else self.solve_chain(scenario)
        return build_gate_context(
            chain,
            scenario.state_frequencies(),
            scenario.rydberg_indices(),
            scenario.pair_indices(),
            scenario.gate_coupling(self.scaled_units(scenario)),
            n_bar=scenario.thermal.mean_occupation,
            thermal_reference=scenario.thermal_reference_index(),
            duration_periods=scenario.pulse.duration_bus_periods,
            subcrystals=scenario.subcrystal_indices(),
            shape=scenario.pulse.shape,
            quadrature_nodes=self.settings.QUADRATURE_NODES,
            quadrature_max_phase=self.settings.QUADRATURE_MAX_PHASE,
        )
