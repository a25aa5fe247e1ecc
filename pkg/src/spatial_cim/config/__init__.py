"""Runtime settings and the experiment file schema."""
from .env_config import EnvConfig, configure_logging
from .schema import (
    SCHEMA_VERSION,
    ExperimentSpec,
    GraphSpec,
    OutputConfig,
    PumpConfig,
    RunConfig,
    UnitsConfig,
    apply_preset,
    dump_experiment,
    load_experiment,
    load_presets,
    parse_experiment,
    preset_setting,
    table_pump_multiple,
)

__all__ = [
    "EnvConfig",
    "ExperimentSpec",
    "GraphSpec",
    "OutputConfig",
    "PumpConfig",
    "RunConfig",
    "SCHEMA_VERSION",
    "UnitsConfig",
    "apply_preset",
    "configure_logging",
    "dump_experiment",
    "load_experiment",
    "load_presets",
    "parse_experiment",
    "preset_setting",
    "table_pump_multiple",
]
