"""
Equilibrium runner: axial positions of the chain.
"""

from typing import Any, Dict

from config.scenario import ScenarioConfig
from physics.equilibrium import positions_frame, spacing_statistics

from .base import BaseRunner


class EquilibriumRunner(BaseRunner):
    """Writes ``equilibrium.csv`` (index, z_scaled) and a JSON with solver and spacing figures"""

    command = "equilibrium"

    def execute(self, scenario: ScenarioConfig) -> Dict[str, Any]:
        chain = self.solve_chain(scenario)
        units = self.scaled_units(scenario)
        self.store.write_csv(positions_frame(chain), "equilibrium.csv")

        summary: Dict[str, Any] = {
            "ion_count": chain.ion_count,
            "k4": chain.k4,
            "iterations": chain.iterations,
            "residual": chain.residual,
            "energy": chain.energy,
            "length_scale_um": float(units.to_micrometers(1.0)),
        }
        if chain.ion_count > 1:
            stats = spacing_statistics(chain)
            summary.update(
                central_mean_spacing=stats.mean_spacing,
                central_relative_std=stats.relative_std,
                central_mean_spacing_um=float(units.to_micrometers(stats.mean_spacing)),
                chain_length_um=float(units.to_micrometers(chain.positions[-1] - chain.positions[0])),
            )

        self.store.write_json(summary, "equilibrium.json")
        return summary
