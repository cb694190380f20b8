# Experiment configuration: schema and loader

from .schema import (
    DriftRunSection,
    ExperimentConfig,
    IsingSection,
    PdcSection,
    SamplingSection,
    SweepSection,
)
from .config_loader import (
    CONFIGS_DIR,
    ConfigLoadError,
    clear_config_cache,
    config_with_overrides,
    load_config,
    load_config_cached,
    safe_load_config,
)

__all__ = [
    "DriftRunSection",
    "ExperimentConfig",
    "IsingSection",
    "PdcSection",
    "SamplingSection",
    "SweepSection",
    "CONFIGS_DIR",
    "ConfigLoadError",
    "clear_config_cache",
    "config_with_overrides",
    "load_config",
    "load_config_cached",
    "safe_load_config",
]
