"""
Experiment Config Loader

Provides:
- safe_load_config(): Load a config JSON without raising
- load_config(): Load a config JSON, raising ConfigError
- load_config_cached(): LRU-cached loading keyed by resolved path
- config_with_overrides(): Copy of a config with CLI overrides applied
- ConfigLoadError: Structured error object for clean downstream handling
"""

import json
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

from loguru import logger
from pydantic import ValidationError

from core.device import check_breakdown
from utils.errors import ConfigError

from .schema import ExperimentConfig

# Directory of the shipped configs
CONFIGS_DIR = Path(__file__).parent

# Run manifests embed the full config under "config"
MANIFEST_KIND = "smtj-run-manifest"


class ConfigLoadError:
    """
    Structured error object for config loading failures.

    Lets callers branch on ``ok`` instead of catching exceptions.
    """
    def __init__(self, message: str, path: str = ""):
        self.message = message
        self.path = path
        self.ok = False

    def __repr__(self) -> str:
        return f"ConfigLoadError(path='{self.path}', message='{self.message}')"


def resolve_config_path(path: Union[str, Path]) -> Path:
    """Accept a file path or the bare name of a shipped config."""
    candidate = Path(path)
    if candidate.exists():
        return candidate.resolve()
    shipped = CONFIGS_DIR / (candidate.name if candidate.suffix else f"{candidate.name}.json")
    return shipped.resolve() if shipped.exists() else candidate


def _warn_operating_points(cfg: ExperimentConfig) -> None:
    currents = [cfg.pdc.current_uA or 0.0, *cfg.pdc.cdf_currents_uA, *cfg.sweep.currents_uA, cfg.drift_run.current_uA]
    for current in sorted(set(currents)):
        check_breakdown(current, cfg.device)


def safe_load_config(path: Union[str, Path]) -> Union[ExperimentConfig, ConfigLoadError]:
    """
    Load and validate an experiment config.

    Returns:
        ExperimentConfig: Parsed config if successful
        ConfigLoadError: Error object if loading fails
    """
    file_path = resolve_config_path(path)
    try:
        if not file_path.exists():
            return ConfigLoadError(f"Config file not found: {file_path}", str(path))

        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if isinstance(data, dict) and data.get("kind") == MANIFEST_KIND:
            data = data["config"]

        cfg = ExperimentConfig.model_validate(data)
        _warn_operating_points(cfg)

        logger.info(f"[OK] Loaded config: {file_path.name} | name={cfg.name} | seed={cfg.seed}")
        return cfg

    except json.JSONDecodeError as e:
        msg = f"Invalid JSON in config file: {e}"
        logger.error(msg)
        return ConfigLoadError(msg, str(path))
    except ValidationError as e:
        msg = f"Invalid config ({e.error_count()} errors): {e}"
        logger.error(msg)
        return ConfigLoadError(msg, str(path))
    except OSError as e:
        msg = f"Config read error: {e}"
        logger.error(msg)
        return ConfigLoadError(msg, str(path))


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load and validate an experiment config.

    Raises:
        ConfigError: If the file is missing, malformed or invalid.
    """
    result = safe_load_config(path)
    if isinstance(result, ConfigLoadError):
        raise ConfigError(result.message)
    return result


@lru_cache(maxsize=8)
def _load_resolved(resolved: str) -> Optional[ExperimentConfig]:
    result = safe_load_config(resolved)
    if isinstance(result, ConfigLoadError):
        logger.warning(f"Cached config load failed: {result.message}")
        return None
    return result


def load_config_cached(path: Union[str, Path]) -> Optional[ExperimentConfig]:
    """LRU-cached loading; returns None on failure."""
    return _load_resolved(str(resolve_config_path(path)))


def clear_config_cache() -> None:
    """Clear the LRU cache (useful for testing or reloading)."""
    _load_resolved.cache_clear()
    logger.info("Config cache cleared")


def config_with_overrides(cfg: ExperimentConfig, seed: Optional[int] = None,
                          workers: Optional[int] = None) -> ExperimentConfig:
    """
    Copy of ``cfg`` with command-line overrides, revalidated.

    Raises:
        ConfigError: If an override is out of range.
    """
    data = cfg.model_dump()
    if seed is not None:
        data["seed"] = seed
    if workers is not None:
        data["workers"] = workers
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid override: {e}") from e
