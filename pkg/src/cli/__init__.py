"""
Command-line orchestration: synthetic data, pipeline runs, verification
and budget reports
"""

from .config import PipelineConfig, DateRange, load_config, config_hash
from .synth import PopulationParams, cmd_synth
from .runner import RunResult, cmd_run, cmd_verify, cmd_budget_report
from .main import main

__all__ = [
    'PipelineConfig',
    'DateRange',
    'load_config',
    'config_hash',
    'PopulationParams',
    'cmd_synth',
    'RunResult',
    'cmd_run',
    'cmd_verify',
    'cmd_budget_report',
    'main'
]
