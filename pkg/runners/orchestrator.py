"""
Runner orchestrator: maps CLI commands to runners and drives the full reproduction bundle.
"""

import time
from typing import Any, Dict, List, Type

import structlog

from config.scenario import PRESETS, ScenarioConfig
from physics.errors import ParameterValidationError
from physics.fidelity import decay_penalty
from physics.gate_protocol import ModeSet
from physics.trap_units import PhysicalConstants, ell_frequency_ratio
from storage.artifacts import ArtifactStore
from storage.records import (
    BogoliubovRecord,
    DecayRecord,
    DelayRecord,
    EquilibriumRecord,
    GateRecord,
    LocalizationRecord,
    ReproductionSummary,
    UnitsRecord,
)

from .base import BaseRunner, RunnerStatus, RunResult
from .dressing import DressingRunner
from .equilibrium import EquilibriumRunner
from .gate_scan import DelayScanRunner, GateScanRunner
from .modes import ModesRunner

REPRODUCE_COMMAND = "reproduce-paper"


class RunnerOrchestrator:
    """
    Owns one runner per command.
    ``reproduce`` re-runs every preset into its own subdirectory and writes ``summary.json``.
    """

    runner_classes: Dict[str, Type[BaseRunner]] = {
        "equilibrium": EquilibriumRunner,
        "modes": ModesRunner,
        "gate-scan": GateScanRunner,
        "delay-scan": DelayScanRunner,
        "dressing": DressingRunner,
    }

    def __init__(self, settings: Any, store: ArtifactStore):
        self.settings = settings
        self.store = store
        self.logger = structlog.get_logger(component="orchestrator")

        self.runners: Dict[str, BaseRunner] = {}
        self._initialize_runners()

    def _initialize_runners(self) -> None:
        for command, runner_class in self.runner_classes.items():
            self.runners[command] = runner_class(
                name=command.replace("-", "_"),
                settings=self.settings,
                store=self.store,
            )
            self.logger.debug(f"Initialized {command} runner")

    @classmethod
    def commands(cls) -> List[str]:
        return list(cls.runner_classes) + [REPRODUCE_COMMAND]

    def run(self, command: str, scenario: ScenarioConfig) -> RunResult:
        if command == REPRODUCE_COMMAND:
            return self.reproduce(scenario)
        if command not in self.runners:
            raise ParameterValidationError(
                f"Unknown command {command!r}",
                details={"available": self.commands()},
            )
        self.logger.info("Dispatching command", command=command, scenario=scenario.name)
        return self.runners[command].run(scenario)

    def get_status(self) -> Dict[str, Any]:
        return {
            "runners": {name: runner.get_status() for name, runner in self.runners.items()},
            "artifacts": self.store.get_stats(),
        }

    def _runner(self, command: str, subdirectory: str) -> BaseRunner:
        runner_class = self.runner_classes[command]
        return runner_class(
            name=command.replace("-", "_"),
            settings=self.settings,
            store=self.store.subdirectory(subdirectory),
        )

    @staticmethod
    def preset_scenario(base: ScenarioConfig, preset: str) -> ScenarioConfig:
        """The base scenario's chain and numerics with a preset's ion layout"""
        data = base.model_dump()
        data.update(
            rydberg_ions=[],
            gate_pairs=[],
            subcrystals=None,
            mode_set=ModeSet.ALL,
        )
        data.update(PRESETS[preset])
        return ScenarioConfig(**data)

    def reproduce(self, scenario: ScenarioConfig) -> RunResult:
        """Every preset and scan of the study, then a schema-checked summary"""
        self.logger.info("Starting full reproduction", ion_count=scenario.ion_count)
        started = time.perf_counter()
        bare = self.preset_scenario(scenario, "bare-chain")
        two = self.preset_scenario(scenario, "two-rydberg")
        four = self.preset_scenario(scenario, "four-rydberg")

        equilibrium = self._runner("equilibrium", "equilibrium").run(bare).summary
        self._runner("modes", "bare_modes").run(bare)
        localization = []
        for preset, subdirectory in ((two, "two_rydberg_modes"), (four, "four_rydberg_modes")):
            modes = self._runner("modes", subdirectory).run(preset).summary
            localization.append(
                LocalizationRecord(
                    scenario=preset.name,
                    rydberg_ions=preset.rydberg_ions,
                    subcrystals=list(modes.get("subcrystals", {}).values()),
                    localized_modes=modes.get("localized_mode_counts", {}),
                    max_truncation_discrepancy=modes.get("max_truncation_discrepancy"),
                )
            )

        gate_runner = self._runner("gate-scan", "gate_scan")
        context = gate_runner.gate_context(four)
        gates = [
            GateRecord(**gate_runner.scan(four, context, mode_set, name=f"gate_scan_{mode_set.value}")["best"])
            for mode_set in ModeSet
        ]

        delay_runner = self._runner("delay-scan", "delay_scan")
        delays = [
            DelayRecord(**delay_runner.scan(four, context, mode_set, name=f"delay_scan_{mode_set.value}")["worst"])
            for mode_set in (ModeSet.ALL, ModeSet.BARE)
        ]

        dressing = self._runner("dressing", "dressing").run(four).summary

        units = gate_runner.scaled_units(four)
        consts = PhysicalConstants.calcium_40()
        omega_ell = ell_frequency_ratio(four.trap.parameters(), consts)
        mapping = context.mapping_for(ModeSet.ALL)
        summary = ReproductionSummary(
            version=self.settings.VERSION,
            units=UnitsRecord(
                length_scale_um=float(units.to_micrometers(1.0)),
                frequency_scale_rad_s=units.frequency_scale,
                k4=scenario.k4,
                omega_ell_over_omegas=omega_ell,
                omega_ell_mhz=float(units.to_megahertz(omega_ell)),
                bus_period_us=float(units.to_microseconds(context.bus_period(ModeSet.ALL))),
                gate_time_us=float(units.to_microseconds(context.gate_duration(ModeSet.ALL))),
            ),
            equilibrium=EquilibriumRecord(
                ion_count=equilibrium["ion_count"],
                iterations=equilibrium["iterations"],
                residual=equilibrium["residual"],
                central_mean_spacing=equilibrium.get("central_mean_spacing"),
                central_relative_std=equilibrium.get("central_relative_std"),
                central_mean_spacing_um=equilibrium.get("central_mean_spacing_um"),
            ),
            localization=localization,
            gates=gates,
            delays=delays,
            bogoliubov=BogoliubovRecord(
                orthogonality_error=mapping.orthogonality_error(),
                commutation_error=mapping.commutation_error(),
            ),
            decay=DecayRecord(
                per_ion=decay_penalty(1, four.trap.excited_duration, four.trap.rydberg_lifetime),
                four_ion=decay_penalty(4, four.trap.excited_duration, four.trap.rydberg_lifetime),
                excited_duration_us=four.trap.excited_duration * 1e6,
                lifetime_us=four.trap.rydberg_lifetime * 1e6,
            ),
            dressing=dressing,
        )
        summary.artifacts = sorted(self.store.relative(path) for path in self.store.written) + ["summary.json"]
        self.store.write_json(summary, "summary.json")

        self.logger.info(
            "Full reproduction complete",
            artifacts=len(summary.artifacts),
            shaped_max_fidelity=gates[0].max_fidelity,
            bare_max_fidelity=gates[-1].max_fidelity,
        )
        return RunResult(
            command=REPRODUCE_COMMAND,
            status=RunnerStatus.COMPLETED,
            execution_time=time.perf_counter() - started,
            artifacts=summary.artifacts,
            summary=summary.model_dump(mode="json"),
        )
