"""
Tests for the clocked time-to-digital read-out.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.temporal import NEVER, EdgeEvent
from core.timing import (
    ClockConfig,
    join_count,
    measure_window,
    min_detectable_dwell,
    period_from_control_word,
    quantize,
    split_count,
)
from utils.errors import DomainError, MeasurementError


@pytest.mark.unit
class TestQuantize:
    """Test floor quantisation"""

    def test_floor(self):
        assert quantize(1.2e-6, 500e-9) == 2
        assert quantize(0.0, 500e-9) == 0
        assert quantize(499e-9, 500e-9) == 0

    def test_exact_multiples_count_fully(self):
        for k in (1, 3, 7, 2001, 65535):
            assert quantize(k * 500e-9, 500e-9) == k

    def test_monotone(self):
        rng = np.random.default_rng(9)
        times = np.sort(rng.uniform(0.0, 1e-3, size=5000))
        counts = [quantize(float(t), 500e-9) for t in times]
        assert all(a <= b for a, b in zip(counts, counts[1:]))

    def test_negative_interval_rejected(self):
        with pytest.raises(DomainError):
            quantize(-1e-9, 500e-9)


@pytest.mark.unit
class TestMeasureWindow:
    """Test counting between reference and latched edges"""

    def test_one_millisecond(self, clock):
        """Test 1 ms plus the 625 ns offset reads 2001 counts"""
        result = measure_window(EdgeEvent(0.0), EdgeEvent(1e-3), clock)
        assert result.count == 2001
        assert not result.overflowed
        assert result.inferred_time == pytest.approx(1.0005e-3)

    def test_offset_shows_as_extra_counts(self, clock):
        """Test count - floor(t/P) is 1 or 2 and averages 1.25"""
        rng = np.random.default_rng(8)
        extras = []
        for t in rng.uniform(1e-6, 1e-2, size=4000):
            count = measure_window(EdgeEvent(0.0), EdgeEvent(float(t)), clock).count
            extras.append(count - math.floor(t / clock.period))
        assert set(extras) <= {1, 2}
        assert np.mean(extras) == pytest.approx(1.25, abs=0.03)

    def test_phase_argument_overrides(self, clock):
        early = measure_window(EdgeEvent(0.0), EdgeEvent(1e-3), clock, phase=0.0)
        late = measure_window(EdgeEvent(0.0), EdgeEvent(1e-3), clock, phase=400e-9)
        assert late.count == early.count + 1

    def test_inferred_time_bounded_by_interval(self, clock):
        """Test the reconstructed time never overshoots and trails by under one period"""
        rng = np.random.default_rng(10)
        for _ in range(5000):
            reference = EdgeEvent(float(rng.uniform(0.0, 1e-3)))
            latched = EdgeEvent(reference.time + float(rng.uniform(0.0, 10e-3)))
            result = measure_window(reference, latched, clock)
            interval = (latched.time + clock.path_offset) - reference.time
            assert not result.overflowed
            assert result.inferred_time <= interval
            assert interval - result.inferred_time < clock.period

    def test_offset_bounds_count_error(self):
        """Test count(t) <= count(t + d) <= count(t) + ceil(d / P)"""
        rng = np.random.default_rng(11)
        bare = ClockConfig(path_offset=0.0)
        for offset in (100e-9, 625e-9, 1.3e-6):
            shifted = ClockConfig(path_offset=offset)
            extra = math.ceil(offset / bare.period)
            for t in rng.uniform(0.0, 10e-3, size=1000):
                base = measure_window(EdgeEvent(0.0), EdgeEvent(float(t)), bare).count
                count = measure_window(EdgeEvent(0.0), EdgeEvent(float(t)), shifted).count
                assert base <= count <= base + extra

    def test_never_overflows(self, clock):
        result = measure_window(EdgeEvent(0.0), NEVER, clock)
        assert result.overflowed
        assert result.count == clock.max_count == 65535

    def test_long_window_saturates(self, clock):
        result = measure_window(EdgeEvent(0.0), EdgeEvent(0.04), clock)
        assert result.overflowed
        assert result.count == clock.max_count

    def test_max_window(self, clock):
        assert clock.max_window == pytest.approx(65535 * 500e-9)
        assert min_detectable_dwell(clock) == clock.period


@pytest.mark.failure
class TestMeasureWindowFailures:
    """Test misconfigured timing paths"""

    def test_missing_reference(self, clock):
        with pytest.raises(MeasurementError):
            measure_window(NEVER, EdgeEvent(1e-3), clock)

    def test_negative_window(self, clock):
        with pytest.raises(MeasurementError):
            measure_window(EdgeEvent(1.0), EdgeEvent(0.0), clock)


@pytest.mark.edge
class TestClockConfig:
    """Test clock validation and control words"""

    def test_period_range(self):
        with pytest.raises(ValidationError):
            ClockConfig(period=10e-9)
        with pytest.raises(ValidationError):
            ClockConfig(period=1e-4)

    def test_phase_below_period(self):
        with pytest.raises(ValidationError):
            ClockConfig(start_phase=500e-9)

    def test_control_word(self):
        assert period_from_control_word(10) == pytest.approx(500e-9)
        assert period_from_control_word(1000) == pytest.approx(50e-6)
        with pytest.raises(DomainError):
            period_from_control_word(0)

    def test_eight_bit_counter(self):
        cfg = ClockConfig(counter_bits=8)
        assert cfg.max_count == 255


@pytest.mark.unit
class TestChainedCounters:
    """Test splitting a count across 8-bit stages"""

    def test_split(self):
        assert split_count(0x1234) == (0x34, 0x12)
        assert join_count((0x34, 0x12)) == 0x1234

    def test_overflowing_count_rejected(self):
        with pytest.raises(DomainError):
            split_count(1 << 16)

    def test_stage_too_wide(self):
        with pytest.raises(DomainError):
            join_count((256, 0))
