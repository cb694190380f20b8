"""
Tests for experiment config loading.

Tests:
- Shipped configs validate
- Malformed files come back as ConfigLoadError
- Run manifests load as configs
- Command-line overrides
"""

import json

import pytest
from pydantic import ValidationError

from config import settings
from configs.config_loader import (
    CONFIGS_DIR,
    MANIFEST_KIND,
    ConfigLoadError,
    clear_config_cache,
    config_with_overrides,
    load_config,
    load_config_cached,
    resolve_config_path,
    safe_load_config,
)
from configs.schema import ExperimentConfig, PdcSection, SamplingSection, SweepSection
from utils.errors import ConfigError

SHIPPED = ["default", "sweep", "drift", "weighted", "ising_2x2"]


@pytest.mark.normal
class TestShippedConfigs:
    """Test every config in configs/ loads"""

    @pytest.mark.parametrize("name", SHIPPED)
    def test_loads(self, name):
        cfg = load_config(name)
        assert isinstance(cfg, ExperimentConfig)
        assert cfg.name == name

    def test_resolve_by_name_and_path(self):
        assert resolve_config_path("default") == (CONFIGS_DIR / "default.json").resolve()
        assert resolve_config_path(CONFIGS_DIR / "sweep.json") == (CONFIGS_DIR / "sweep.json").resolve()

    def test_drift_config(self):
        cfg = load_config("drift")
        assert cfg.drift.enabled
        assert cfg.device.delta == pytest.approx(14.3)
        assert cfg.drift_run.n_bins == 30

    def test_frontend_section(self, tmp_path):
        path = tmp_path / "frontend.json"
        path.write_text(json.dumps({
            "frontend": {
                "hysteresis": {"r_f": 50000.0, "r_hth": 1000.0, "v_ref": 0.55},
                "transconductance": {"v_in": 5.6},
            }
        }), encoding="utf-8")
        cfg = load_config(path)
        assert cfg.hysteresis.v_ref == pytest.approx(0.55)
        assert cfg.transconductance.v_in == pytest.approx(5.6)
        assert cfg.reference == ExperimentConfig().reference

    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.seed == settings.DEFAULT_SEED
        assert cfg.workers == 1
        assert cfg.sweep.currents_uA[0] == 650.0
        assert len(cfg.sweep.currents_uA) == 8


@pytest.mark.failure
class TestBadConfigs:
    """Test files that must not load"""

    def test_missing_file(self, tmp_path):
        result = safe_load_config(tmp_path / "nope.json")
        assert isinstance(result, ConfigLoadError)
        assert result.ok is False
        assert "not found" in result.message

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json", encoding="utf-8")
        result = safe_load_config(path)
        assert isinstance(result, ConfigLoadError)
        assert "Invalid JSON" in result.message

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "extra.json"
        path.write_text(json.dumps({"name": "x", "colour": "blue"}), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_wrong_critical_current_sign(self, tmp_path):
        path = tmp_path / "sign.json"
        path.write_text(json.dumps({"device": {"i_c": 3000.0}}), encoding="utf-8")
        result = safe_load_config(path)
        assert isinstance(result, ConfigLoadError)
        assert "i_c" in result.message

    def test_seed_range(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(seed=-1)
        with pytest.raises(ValidationError):
            ExperimentConfig(seed=2**64)

    def test_short_sweep(self):
        with pytest.raises(ValidationError, match="at least 4"):
            SweepSection(currents_uA=[700.0, 800.0, 900.0])

    def test_histogram_needs_three_bins(self, tmp_path):
        with pytest.raises(ValidationError):
            PdcSection(n_bins=2)
        path = tmp_path / "bins.json"
        path.write_text(json.dumps({"pdc": {"n_bins": 2}}), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)
        assert PdcSection(n_bins=3).n_bins == 3

    def test_frontend_given_twice(self):
        with pytest.raises(ValidationError, match="both"):
            ExperimentConfig.model_validate({"hysteresis": {}, "frontend": {"hysteresis": {}}})

    def test_frontend_unknown_stage(self):
        with pytest.raises(ValidationError, match="unknown frontend keys"):
            ExperimentConfig.model_validate({"frontend": {"comparator": {}}})

    def test_sampling_needs_a_source(self):
        with pytest.raises(ValidationError):
            SamplingSection(rates=None, currents_uA=None)


@pytest.mark.normal
class TestManifestReplay:
    """Test a run manifest is accepted as a config"""

    def test_manifest_unwrapped(self, tmp_path, small_config):
        path = tmp_path / "manifest.json"
        path.write_text(
            json.dumps({"kind": MANIFEST_KIND, "command": "drift", "config": small_config.model_dump(mode="json")}),
            encoding="utf-8",
        )
        assert load_config(path) == small_config

    def test_file_round_trip(self, small_config_file, small_config):
        assert load_config(small_config_file) == small_config


@pytest.mark.normal
class TestOverrides:
    """Test seed and worker overrides"""

    def test_seed_override(self, small_config):
        cfg = config_with_overrides(small_config, seed=99)
        assert cfg.seed == 99
        assert small_config.seed == 7

    def test_no_override_keeps_config(self, small_config):
        assert config_with_overrides(small_config) == small_config

    def test_invalid_override(self, small_config):
        with pytest.raises(ConfigError):
            config_with_overrides(small_config, workers=0)


@pytest.mark.normal
class TestCache:
    """Test the LRU-cached loader"""

    def test_cached_instance(self):
        clear_config_cache()
        first = load_config_cached("default")
        assert first is not None
        assert load_config_cached("default") is first
        clear_config_cache()
        assert load_config_cached("default") is not first

    def test_cached_failure_is_none(self, tmp_path):
        assert load_config_cached(tmp_path / "missing.json") is None
