"""Experiments, pump sweeps, threshold checks and the command line."""
from .models import ReportBundle, SeedFailure, SeedResult, aggregate, hardware_time, is_success
from .threshold import ThresholdBracket, bracket_threshold
from .experiment import build_graph, reference_ground_state, run_experiment
from .sweep import pump_sweep
from .report import recompute_report

__all__ = [
    "ReportBundle",
    "SeedFailure",
    "SeedResult",
    "ThresholdBracket",
    "aggregate",
    "bracket_threshold",
    "build_graph",
    "hardware_time",
    "is_success",
    "pump_sweep",
    "recompute_report",
    "reference_ground_state",
    "run_experiment",
]
