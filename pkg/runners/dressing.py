"""
Microwave-dressing runner: dressed-state numbers, the laser π-pulse into |−⟩ and the adiabatic ramp to |P⟩.
"""

import math
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from config.scenario import ScenarioConfig
from physics.rydberg_excitation import (
    P_STATE_POLARIZABILITY_PER_N7,
    ThreeLevelTrajectory,
    adiabatic_ramp,
    dressed_analysis,
    dressed_polarizability,
    evolve_dressed_model,
    evolve_three_level,
    laser_rabi_for_dressed_coupling,
    polarizability_zero_mixing,
    ramp_hold_time,
    trajectory_frame,
    transfer_time,
)
from storage.records import DressingRecord

from .base import BaseRunner

MHZ = 2 * math.pi * 1e6


def population_at(trajectory: ThreeLevelTrajectory, t: float, level: int = 1) -> float:
    """Population of ``level`` at time t, linearly interpolated between samples"""
    return float(np.interp(t, trajectory.times, trajectory.populations[:, level]))


def _ns(value: Optional[float]) -> Optional[float]:
    return None if value is None else value * 1e9


class DressingRunner(BaseRunner):
    command = "dressing"

    def execute(self, scenario: ScenarioConfig) -> Dict[str, Any]:
        record = self.dressing_record(scenario)
        self.store.write_json(record, "dressing.json")
        return record.model_dump()

    def dressing_record(self, scenario: ScenarioConfig) -> DressingRecord:
        dressing = scenario.dressing
        steps = self.settings.RK4_STEPS_PER_PERIOD
        samples = self.settings.TRAJECTORY_SAMPLES

        system = dressing.system()
        omega_l = laser_rabi_for_dressed_coupling(system, dressing.omega_minus)
        driven = system.with_laser(omega_l)
        states = dressed_analysis(driven)

        p_np = P_STATE_POLARIZABILITY_PER_N7 * dressing.principal_number**7
        p_ns = -dressing.s_to_p_polarizability_ratio * p_np
        zero_mixing = polarizability_zero_mixing(p_np, p_ns)
        _, p_minus = dressed_polarizability(states, p_np, p_ns)

        # laser π-pulse from |D⟩ into the dressed |−⟩
        pulse = evolve_three_level(driven, dressing.pi_pulse_duration, steps_per_period=steps, samples=samples)
        self.store.write_csv(trajectory_frame(pulse), "pi_pulse.csv")
        full_minus = pulse.dressed_populations()[:, 0]
        reduced = np.abs(evolve_dressed_model(driven, pulse.times)) ** 2
        two_level = np.abs(evolve_dressed_model(driven, pulse.times, include_plus=False)) ** 2
        self.store.write_csv(
            pd.DataFrame(
                {
                    "t_ns": pulse.times * 1e9,
                    "pop_minus_full": full_minus,
                    "pop_minus_reduced": reduced[:, 1],
                    "pop_minus_two_level": two_level[:, 1],
                }
            ),
            "reduced_model.csv",
        )

        # microwave ramp from |−⟩ to |P⟩, laser off
        ramp_args = dict(cutoff=dressing.ramp_cutoff, steps_per_period=steps, samples=samples)
        sweep = dressing.sweep_rate
        ramp = adiabatic_ramp(system, sweep, dressing.ramp_duration_ns * 1e-9, **ramp_args)
        slow = adiabatic_ramp(system, 0.5 * sweep, dressing.slow_ramp_duration_ns * 1e-9, **ramp_args)
        self.store.write_csv(trajectory_frame(ramp), "ramp.csv")
        self.store.write_csv(trajectory_frame(slow), "ramp_slow.csv")
        hold = ramp_hold_time(system, sweep, dressing.ramp_cutoff)

        record = DressingRecord(
            c_minus=states.c_minus,
            c_plus=states.c_plus,
            autler_townes_splitting_mhz=states.splitting / MHZ,
            omega_l_mhz=omega_l / MHZ,
            omega_minus_mhz=states.omega_minus / MHZ,
            omega_plus_mhz=states.omega_plus / MHZ,
            zero_polarizability_mixing=zero_mixing,
            dressed_polarizability_minus=p_minus,
            pi_pulse_us=dressing.pi_pulse_duration * 1e6,
            pi_pulse_transfer=float(full_minus[-1]),
            reduced_model_max_deviation=float(np.max(np.abs(reduced[:, 1] - full_minus))),
            ramp_hold_time_ns=hold * 1e9,
            ramp_transfer_time_ns=_ns(transfer_time(ramp)),
            ramp_p_population_at_hold=population_at(ramp, min(hold, ramp.times[-1])),
            ramp_final_p_population=float(ramp.populations[-1, 1]),
            slow_ramp_transfer_time_ns=_ns(transfer_time(slow)),
            slow_ramp_final_p_population=float(slow.populations[-1, 1]),
        )
        self.logger.info(
            "Dressing analysed",
            c_minus=record.c_minus,
            pi_pulse_transfer=record.pi_pulse_transfer,
            ramp_transfer_time_ns=record.ramp_transfer_time_ns,
            ramp_hold_time_ns=record.ramp_hold_time_ns,
        )
        return record
