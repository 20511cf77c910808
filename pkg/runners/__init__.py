"""
Command runners for the ion-chain mode-shaping simulator.
"""

from .base import BaseRunner, RunnerMetrics, RunnerStatus, RunResult
from .dressing import DressingRunner
from .equilibrium import EquilibriumRunner
from .gate_scan import DelayScanRunner, GateScanRunner
from .modes import ModesRunner
from .orchestrator import REPRODUCE_COMMAND, RunnerOrchestrator

__all__ = [
    'BaseRunner',
    'RunnerMetrics',
    'RunnerStatus',
    'RunResult',
    'DressingRunner',
    'EquilibriumRunner',
    'DelayScanRunner',
    'GateScanRunner',
    'ModesRunner',
    'REPRODUCE_COMMAND',
    'RunnerOrchestrator'
]
