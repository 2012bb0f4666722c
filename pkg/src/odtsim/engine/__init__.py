"""Closed-loop simulation engine and post-run analysis."""

from .analysis import (
    AnalysisError,
    classify_stages,
    compute_metrics,
    measure_scene_latency,
    measure_ve_drift,
    measure_working_delay,
    stage_boundaries,
    stage_sequence,
)
from .config import ControllerParams, LatencyParams, LocomotionParams, ScenarioConfig, rotate_scenario
from .loop import run
from .trace import COLUMNS, Trace, TraceRecord, record_row

__all__ = [
    "AnalysisError", "COLUMNS", "ControllerParams", "LatencyParams", "LocomotionParams",
    "ScenarioConfig", "Trace", "TraceRecord", "classify_stages", "compute_metrics",
    "measure_scene_latency", "measure_ve_drift", "measure_working_delay", "record_row",
    "rotate_scenario", "run", "stage_boundaries", "stage_sequence",
]
