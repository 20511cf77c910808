"""
Normal-mode runner: eigenvectors, spectrum, localization and sub-crystal truncation.
"""

from typing import Any, Dict, List

import pandas as pd

from config.scenario import ScenarioConfig
from physics.gate_protocol import ModeSet
from physics.normal_modes import (
    ElectronicAssignment,
    build_hessian,
    diagonalize,
    frequency_frame,
    localization_frame,
    localized_mode_analysis,
    mode_frame,
    subcrystals_from_rydberg_ions,
    truncated_subcrystal_modes,
    truncation_report,
)

from .base import BaseRunner


def subcrystal_label(host: List[int]) -> str:
    """1-based ion range, e.g. ``46-55``"""
    return f"{host[0] + 1}-{host[-1] + 1}"


class ModesRunner(BaseRunner):
    """
    Transverse modes for the scenario's electronic assignment.

    ``--mode-set bare`` ignores the Rydberg ions and reports the all-ELL chain.
    With Rydberg ions present the runner also writes per-sub-crystal
    localization weights and the truncated-versus-full frequency comparison.
    """

    command = "modes"

    def execute(self, scenario: ScenarioConfig) -> Dict[str, Any]:
        chain = self.solve_chain(scenario)
        frequencies = scenario.state_frequencies()
        rydberg = [] if scenario.mode_set is ModeSet.BARE else scenario.rydberg_indices()
        assignment = ElectronicAssignment.from_rydberg_ions(chain.ion_count, rydberg, frequencies)
        modes = diagonalize(build_hessian(chain, assignment))

        self.store.write_csv(mode_frame(modes), "modes.csv")
        self.store.write_csv(frequency_frame(modes), "frequencies.csv")
        self.store.write_heatmap(
            modes.amplitude_matrix(),
            "modes.svg",
            xlabel="ion index",
            ylabel="mode index",
            title=f"|B| ({scenario.name}, {'shaped' if rydberg else 'bare'})",
        )

        units = self.scaled_units(scenario)
        summary: Dict[str, Any] = {
            "ion_count": chain.ion_count,
            "rydberg_ions": [i + 1 for i in rydberg],
            "lowest_frequency": float(modes.frequencies[0]),
            "highest_frequency": float(modes.frequencies[-1]),
            "highest_frequency_mhz": float(units.to_megahertz(modes.frequencies[-1])),
            "orthonormality_error": modes.orthonormality_error(),
            "max_eigen_residual": float(modes.residuals().max()),
        }

        hosts = scenario.subcrystal_indices() if scenario.subcrystals is not None else None
        if hosts is None:
            hosts = subcrystals_from_rydberg_ions(chain.ion_count, rydberg)
        if not hosts or not rydberg:
            return summary

        labelled = {subcrystal_label(host): host for host in hosts}
        self.store.write_csv(localization_frame(modes, labelled), "localization.csv")

        localized: Dict[str, List[int]] = {}
        reports = []
        for label, host in labelled.items():
            selected, _ = localized_mode_analysis(modes, host, scenario.localization_threshold)
            localized[label] = [j + 1 for j in selected]
            report = truncation_report(modes, truncated_subcrystal_modes(chain, assignment, host), host)
            report.insert(0, "subcrystal", label)
            reports.append(report)
        truncation = pd.concat(reports, ignore_index=True)
        self.store.write_csv(truncation, "truncation.csv")

        summary.update(
            subcrystals={label: [i + 1 for i in host] for label, host in labelled.items()},
            localized_modes=localized,
            localized_mode_counts={label: len(ids) for label, ids in localized.items()},
            max_truncation_discrepancy=float(truncation["relative_discrepancy"].max()),
        )
        self.logger.info(
            "Localized modes identified",
            counts=summary["localized_mode_counts"],
            max_truncation_discrepancy=summary["max_truncation_discrepancy"],
        )
        return summary
