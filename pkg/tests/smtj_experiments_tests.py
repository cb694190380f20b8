"""
Tests for the measurement pipeline, the current sweep and the runners.

Small trial counts keep the unit tests fast; the full-size runs are marked
slow.
"""

import json
import math

import numpy as np
import pytest

from core.device import mean_dwell
from core.timing import CountResult
from experiments.pipeline import (
    TrialRecord,
    censored_mean,
    lab_clock_offsets,
    measured_times,
    run_pdc_batch,
    run_pdc_trial,
    step_current,
)
from experiments.runners import RUNNERS, ising_problem
from experiments.sweeps import sweep_mean_vs_current
from samplers.ising import random_couplings
from utils.errors import DataError
from utils.output import read_table


def _record(index, count, overflowed=False, period=500e-9):
    return TrialRecord(
        trial_index=index,
        current_uA=918.0,
        true_time=count * period,
        latched_time=count * period,
        result=CountResult(count=count, overflowed=overflowed, period=period),
    )


@pytest.mark.unit
class TestTrial:
    """Test single PDC trials"""

    def test_deterministic(self, small_config):
        assert run_pdc_trial(small_config, 3) == run_pdc_trial(small_config, 3)

    def test_trials_differ(self, small_config):
        times = {run_pdc_trial(small_config, k).true_time for k in range(20)}
        assert len(times) == 20

    def test_batch_changes_stream(self, small_config):
        assert run_pdc_trial(small_config, 0, batch=0) != run_pdc_trial(small_config, 0, batch=1)

    def test_latch_sees_first_switch(self, small_config):
        for k in range(50):
            record = run_pdc_trial(small_config, k)
            if not record.overflowed:
                assert record.latched_time == record.true_time

    def test_systematic_offset(self, small_config):
        """Test the 625 ns path mismatch adds one or two counts"""
        period = small_config.timing.period
        extras = []
        for k in range(200):
            record = run_pdc_trial(small_config, k)
            if not record.overflowed:
                extras.append(record.result.count - math.floor(record.true_time / period))
                offset_time = record.true_time + small_config.timing.path_offset
                assert abs(record.inferred_time - offset_time) < period
        assert set(extras) <= {1, 2}
        assert 1.0 <= np.mean(extras) < 2.0

    def test_transconductance_current_used(self, small_config):
        cfg = small_config.model_copy(update={"pdc": small_config.pdc.model_copy(update={"current_uA": None})})
        assert step_current(cfg) == pytest.approx(918.0)
        assert run_pdc_trial(cfg, 0).current_uA == pytest.approx(918.0)


@pytest.mark.unit
class TestBatch:
    """Test trial batches"""

    def test_ordered_by_index(self, small_config):
        records = run_pdc_batch(small_config, 25)
        assert [r.trial_index for r in records] == list(range(25))

    def test_matches_single_trials(self, small_config):
        records = run_pdc_batch(small_config, 5, batch=2)
        assert records == [run_pdc_trial(small_config, k, batch=2) for k in range(5)]

    def test_workers_do_not_change_results(self, small_config):
        serial = run_pdc_batch(small_config, 40, workers=1)
        parallel = run_pdc_batch(small_config, 40, workers=2)
        assert serial == parallel

    def test_seed_changes_results(self, small_config):
        other = small_config.model_copy(update={"seed": 8})
        assert run_pdc_batch(small_config, 10) != run_pdc_batch(other, 10)

    def test_empty_batch_rejected(self, small_config):
        with pytest.raises(DataError):
            run_pdc_batch(small_config, 0)

    def test_measured_mean(self, small_config):
        """Test corrected counts recover the mean switching time"""
        records = run_pdc_batch(small_config, small_config.pdc.n_trials)
        times = measured_times(records, small_config.timing)
        tau = mean_dwell(918.0, small_config.device)
        assert np.all(times > 0)
        assert abs(times.mean() - tau) < 4 * tau / math.sqrt(times.size)


@pytest.mark.unit
class TestLabClock:
    """Test drift offsets along a batch"""

    def test_none_without_drift(self, small_config):
        assert lab_clock_offsets(small_config, 10) is None

    def test_offsets_with_drift(self, small_config, drift_on):
        cfg = small_config.model_copy(update={"drift": drift_on})
        offsets = lab_clock_offsets(cfg, 100)
        assert len(offsets) == 100
        assert offsets == lab_clock_offsets(cfg, 100)
        # 10 ms spacing against a 10 s correlation time: neighbours barely move
        assert np.max(np.abs(np.diff(offsets))) < 0.05

    def test_drifting_batch_is_reproducible(self, small_config, drift_on):
        cfg = small_config.model_copy(update={"drift": drift_on})
        assert run_pdc_batch(cfg, 10) == run_pdc_batch(cfg, 10)


@pytest.mark.unit
class TestCensoredMean:
    """Test the mean with overflowed trials counted as censored"""

    def test_no_overflow(self, clock):
        records = [_record(k, 2001) for k in range(4)]
        mean, stderr, n_switched, n_over = censored_mean(records, clock)
        expected = 2001 * 500e-9 - 625e-9 + 250e-9
        assert mean == pytest.approx(expected)
        assert stderr == pytest.approx(expected / 2.0)
        assert (n_switched, n_over) == (4, 0)

    def test_overflow_adds_window(self, clock):
        records = [_record(0, 2001), _record(1, clock.max_count, overflowed=True)]
        mean, _, n_switched, n_over = censored_mean(records, clock)
        switched = 2001 * 500e-9 - 625e-9 + 250e-9
        assert mean == pytest.approx(switched + clock.max_window - clock.path_offset)
        assert (n_switched, n_over) == (1, 1)

    def test_all_overflowed(self, clock):
        records = [_record(k, clock.max_count, overflowed=True) for k in range(3)]
        with pytest.raises(DataError):
            censored_mean(records, clock)

    def test_non_positive_times_dropped(self, clock):
        times = measured_times([_record(0, 0), _record(1, 10)], clock)
        assert times.size == 1


@pytest.mark.integration
class TestSweep:
    """Test the current sweep and its combined fit"""

    def test_sweep(self, small_config):
        result = sweep_mean_vs_current(small_config)
        assert all(p.ok for p in result.points)
        rows = result.rows()
        assert [r[0] for r in rows] == [700.0, 850.0, 1000.0, 1150.0]
        means = [r[1] for r in rows]
        assert all(a > b for a, b in zip(means, means[1:]))
        assert result.combined is not None
        assert abs(result.combined.parameters["i_c"] + 3000.0) < 4 * result.combined.uncertainties["i_c"]

    def test_failing_current_is_skipped(self, small_config):
        result = sweep_mean_vs_current(small_config, currents=[100.0, 700.0, 850.0, 1000.0, 1150.0])
        assert not result.points[0].ok
        assert "NoSignal" in result.points[0].error or "window" in result.points[0].error
        assert len(result.rows()) == 4
        assert result.combined is not None

    def test_too_few_points_recorded(self, small_config):
        result = sweep_mean_vs_current(small_config, currents=[700.0, 850.0, 1000.0])
        assert result.combined is None
        assert "at least" in result.combined_error


@pytest.mark.integration
class TestRunners:
    """Test every runner writes its outputs"""

    @pytest.mark.parametrize("command,expected", [
        ("pdc-histogram", {"histogram.csv", "trials.csv", "fit.json"}),
        ("cdf", {"cdf_0.csv", "cdf_1.csv", "cdf_2.csv", "fit.json"}),
        ("mean-vs-current", {"sweep.csv", "fit.json"}),
        ("weighted-sample", {"frequencies.csv", "fit.json"}),
        ("mh-ising", {"distribution.csv", "chain_stats.json"}),
        ("drift", {"drift.csv", "drift.json"}),
    ])
    def test_outputs(self, command, expected, small_config, out_dir):
        outputs, summary = RUNNERS[command](small_config, out_dir)
        assert {p.name for p in outputs} == expected
        assert all(p.exists() for p in outputs)
        assert isinstance(summary, dict)

    def test_json_tables(self, small_config, out_dir):
        outputs, _ = RUNNERS["weighted-sample"](small_config, out_dir, "json")
        assert {p.name for p in outputs} == {"frequencies.json", "fit.json"}
        rows = json.loads((out_dir / "frequencies.json").read_text())
        assert [r["index"] for r in rows] == [0, 1, 2]

    def test_histogram_fit(self, small_config, out_dir):
        _, summary = RUNNERS["pdc-histogram"](small_config, out_dir)
        assert summary["lambda"] == pytest.approx(1.0 / mean_dwell(918.0, small_config.device), rel=0.25)
        header, *rows = read_table(out_dir / "histogram.csv")
        assert header == ["bin_center_s", "count", "error"]
        assert len(rows) == small_config.pdc.n_bins

    def test_weighted_scale_invariance(self, small_config, out_dir):
        RUNNERS["weighted-sample"](small_config, out_dir)
        payload = json.loads((out_dir / "fit.json").read_text())
        assert payload["scaled_probabilities_identical"] is True

    def test_ising_chain_close_to_enumeration(self, small_config, out_dir):
        _, summary = RUNNERS["mh-ising"](small_config, out_dir)
        assert summary["total_variation"] < 0.1

    def test_explicit_couplings(self, small_config):
        ising = small_config.ising.model_copy(update={"couplings": [[0.0, 1.0], [1.0, 0.0]]})
        problem = ising_problem(small_config.model_copy(update={"ising": ising}))
        assert problem.n_spins == 2
        assert problem.fields == [0.0, 0.0]

    def test_random_generator(self, small_config, out_dir):
        ising = small_config.ising.model_copy(update={"generator": "random", "n_spins": 3, "coupling_seed": 11})
        cfg = small_config.model_copy(update={"ising": ising})
        problem = ising_problem(cfg)
        assert problem == random_couplings(3, 11, ising.beta, ising.scale, ising.field_scale, ising.w)
        assert problem.n_spins == 3
        _, summary = RUNNERS["mh-ising"](cfg, out_dir)
        assert summary["total_variation"] < 0.1

    def test_random_generator_defaults_to_run_seed(self, small_config):
        ising = small_config.ising.model_copy(update={"generator": "random", "n_spins": 5})
        problem = ising_problem(small_config.model_copy(update={"ising": ising}))
        assert problem == random_couplings(5, small_config.seed, ising.beta)
        assert problem.fields == [0.0] * 5

    def test_random_generator_from_config(self, small_config):
        from configs.schema import ExperimentConfig

        data = small_config.model_dump()
        data["ising"] = {"generator": "random", "n_spins": 4, "coupling_seed": 3, "scale": 0.5}
        problem = ising_problem(ExperimentConfig.model_validate(data))
        assert problem == random_couplings(4, 3, scale=0.5, beta=0.5)

    def test_rerun_is_byte_identical(self, small_config, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        RUNNERS["pdc-histogram"](small_config, first)
        RUNNERS["pdc-histogram"](small_config, second)
        for name in ("histogram.csv", "trials.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()


@pytest.mark.slow
class TestFullSize:
    """Test full-size runs against the expected physics"""

    def test_exponential_histogram(self, out_dir):
        from configs.config_loader import load_config

        _, summary = RUNNERS["pdc-histogram"](load_config("default"), out_dir)
        assert summary["reduced_chi_squared"] < 2.0
        assert summary["ks_p_value"] > 0.01

    def test_cdf_ordering(self, out_dir):
        from configs.config_loader import load_config

        _, summary = RUNNERS["cdf"](load_config("default"), out_dir)
        assert summary["lambda_increasing"]

    def test_sweep_with_and_without_drift(self):
        from configs.config_loader import load_config
        from stats.fitting import curve_rms_relative_error

        cfg = load_config("sweep")
        still = sweep_mean_vs_current(cfg)
        currents = np.asarray(cfg.sweep.currents_uA)
        true_log_tau = np.log([p.true_tau_s for p in still.points])
        assert curve_rms_relative_error(still.combined, currents, true_log_tau) < 0.03

        drifting = sweep_mean_vs_current(cfg.model_copy(update={"drift": cfg.drift.model_copy(update={"enabled": True})}))
        assert drifting.combined.reduced_chi_squared > 3.0
