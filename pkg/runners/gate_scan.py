"""
Gate runners: fidelity versus pulse frequency and versus the start delay of the second gate.
"""

from typing import Any, Dict, Optional, Sequence

import numpy as np

from config.scenario import ScenarioConfig
from physics.fidelity import decay_penalty, physical_temperature
from physics.gate_protocol import (
    DelayPoint,
    GateContext,
    GatePoint,
    ModeSet,
    best_point,
    delay_points_frame,
    gate_points_frame,
    scan_delay,
    scan_frequency,
)
from physics.trap_units import PhysicalConstants
from storage.records import DelayRecord, GateRecord

from .base import BaseRunner


def gate_record(points: Sequence[GatePoint], mode_set: ModeSet) -> GateRecord:
    best = best_point(points)
    if best is None:
        return GateRecord(mode_set=mode_set.value)
    position = next(k for k, p in enumerate(points) if p is best)
    return GateRecord(
        mode_set=mode_set.value,
        max_fidelity=best.fidelity,
        best_nu_tau_over_2pi=best.nu_factor,
        max_abs_alpha_at_best=best.max_abs_alpha,
        pair_phases_at_best=list(best.pair_phases),
        edge_maximum=position in (0, len(points) - 1),
    )


def delay_record(points: Sequence[DelayPoint], mode_set: ModeSet) -> DelayRecord:
    values = np.array([p.fidelity_max for p in points], dtype=float)
    if values.size == 0 or np.all(np.isnan(values)):
        return DelayRecord(mode_set=mode_set.value)
    worst = int(np.nanargmin(values))
    return DelayRecord(
        mode_set=mode_set.value,
        min_fidelity=float(values[worst]),
        mean_fidelity=float(np.nanmean(values)),
        worst_delay_over_bus_period=points[worst].delay_periods,
    )


class GateScanRunner(BaseRunner):
    """Calibrated parallel-gate fidelity over the ν grid, both gates started together"""

    command = "gate-scan"

    def execute(self, scenario: ScenarioConfig) -> Dict[str, Any]:
        context = self.gate_context(scenario)
        return self.scan(scenario, context, scenario.mode_set)

    def scan(
        self,
        scenario: ScenarioConfig,
        context: GateContext,
        mode_set: ModeSet,
        name: str = "gate_scan",
        nu_factors: Optional[Sequence[float]] = None,
    ) -> Dict[str, Any]:
        grid = scenario.pulse.nu_grid.values() if nu_factors is None else np.asarray(nu_factors, dtype=float)
        points = scan_frequency(context, grid, delay=0.0, mode_set=mode_set, n_jobs=self.n_jobs)
        self.store.write_csv(gate_points_frame(points), f"{name}.csv")

        units = self.scaled_units(scenario)
        tau = context.gate_duration(mode_set)
        record = gate_record(points, mode_set)
        if record.edge_maximum:
            self.logger.warning(
                "Fidelity maximum on the edge of the nu grid",
                mode_set=mode_set.value,
                best_nu_tau_over_2pi=record.best_nu_tau_over_2pi,
            )
        thermal = context.thermal
        temperature = physical_temperature(
            float(thermal.gammas[-1]), float(thermal.frequencies[-1]), units, PhysicalConstants.calcium_40()
        )
        summary = {
            "scenario": scenario.name,
            "points": len(points),
            "bus_frequency": context.bus_frequency(mode_set),
            "bus_period_us": float(units.to_microseconds(context.bus_period(mode_set))),
            "gate_time": tau,
            "gate_time_us": float(units.to_microseconds(tau)),
            "phonon_temperature_mk": 1e3 * temperature,
            "decay_penalty": decay_penalty(
                len(scenario.rydberg_ions),
                scenario.trap.excited_duration,
                scenario.trap.rydberg_lifetime,
            ),
            "best": record.model_dump(),
        }
        self.store.write_json(summary, f"{name}.json")
        self.logger.info(
            "Gate scan finished",
            mode_set=mode_set.value,
            points=len(points),
            max_fidelity=record.max_fidelity,
            best_nu_tau_over_2pi=record.best_nu_tau_over_2pi,
        )
        return summary


class DelayScanRunner(BaseRunner):
    """ν-optimised fidelity for every start delay of the second gate"""

    command = "delay-scan"

    def execute(self, scenario: ScenarioConfig) -> Dict[str, Any]:
        context = self.gate_context(scenario)
        return self.scan(scenario, context, scenario.mode_set)

    def scan(
        self,
        scenario: ScenarioConfig,
        context: GateContext,
        mode_set: ModeSet,
        name: str = "delay_scan",
    ) -> Dict[str, Any]:
        if len(context.layout.pairs) < 2:
            self.logger.warning("Delay scan with a single gate pair has no second gate to delay")
        points = scan_delay(
            context,
            scenario.pulse.delay_grid.values(),
            scenario.pulse.delay_scan_nu_grid.values(),
            mode_set=mode_set,
            n_jobs=self.n_jobs,
        )
        self.store.write_csv(delay_points_frame(points), f"{name}.csv")

        record = delay_record(points, mode_set)
        summary = {
            "scenario": scenario.name,
            "delays": len(points),
            "bus_period": context.bus_period(mode_set),
            "worst": record.model_dump(),
        }
        self.store.write_json(summary, f"{name}.json")
        self.logger.info(
            "Delay scan finished",
            mode_set=mode_set.value,
            delays=len(points),
            min_fidelity=record.min_fidelity,
        )
        return summary
