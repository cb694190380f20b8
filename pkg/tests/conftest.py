"""
Pytest configuration and shared fixtures for the SMTJ simulator tests.
"""

import os
import sys

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from configs.schema import ExperimentConfig  # noqa: E402
from core.device import DeviceParams, DriftModel  # noqa: E402
from core.frontend import HysteresisConfig, TransconductanceConfig  # noqa: E402
from core.timing import ClockConfig  # noqa: E402


@pytest.fixture
def device():
    """Default device constants (tau ~ 1 ms near 918 uA)"""
    return DeviceParams()


@pytest.fixture
def drift_on():
    """Drift process with the default calibration"""
    return DriftModel(enabled=True)


@pytest.fixture
def drift_off():
    return DriftModel()


@pytest.fixture
def rng():
    """Seeded generator"""
    return np.random.default_rng(12345)


@pytest.fixture
def hysteresis():
    """Signal-path comparator with the bench resistor values"""
    return HysteresisConfig()


@pytest.fixture
def transconductance():
    return TransconductanceConfig()


@pytest.fixture
def clock():
    """500 ns clock with the 625 ns path mismatch"""
    return ClockConfig()


@pytest.fixture
def out_dir(tmp_path):
    """Temporary output directory"""
    path = tmp_path / "results"
    path.mkdir()
    return path


@pytest.fixture
def small_config():
    """Experiment config small enough for unit tests"""
    return ExperimentConfig(
        name="small",
        seed=7,
        pdc={"current_uA": 918.0, "cdf_currents_uA": [918.0, 924.0, 930.0], "n_trials": 300, "n_bins": 20},
        sweep={"currents_uA": [700.0, 850.0, 1000.0, 1150.0], "n_trials": 400},
        sampling={"rates": [1.0, 2.0, 3.0], "n_samples": 3000},
        ising={"n_steps": 20_000, "burn_in": 2_000},
        drift_run={"current_uA": 0.0, "n_bins": 4, "events_per_bin": 200},
    )


@pytest.fixture
def small_config_file(tmp_path, small_config):
    """small_config written to disk as JSON"""
    path = tmp_path / "small.json"
    path.write_text(small_config.model_dump_json(indent=2), encoding="utf-8")
    return path
