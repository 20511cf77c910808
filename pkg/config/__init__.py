"""
Configuration package for the ion-chain mode-shaping simulator.
"""

from .scenario import PRESETS, ScenarioConfig, get_preset, load_scenario_from_file
from .settings import Settings, get_settings, validate_configuration

__all__ = [
    'PRESETS',
    'ScenarioConfig',
    'get_preset',
    'load_scenario_from_file',
    'Settings',
    'get_settings',
    'validate_configuration'
]
