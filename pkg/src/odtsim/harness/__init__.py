"""Scenario files, canned experiments, exports and the command line."""

from .configio import ConfigError, load_config, scenario_from_dict, scenario_to_dict
from .export import export_metrics, export_trace, metrics_json, trace_csv
from .presets import PRESETS, PresetError, PresetResult, preset_scenarios, run_preset

__all__ = [
    "ConfigError", "PRESETS", "PresetError", "PresetResult", "export_metrics", "export_trace",
    "load_config", "metrics_json", "preset_scenarios", "run_preset", "scenario_from_dict",
    "scenario_to_dict", "trace_csv",
]
