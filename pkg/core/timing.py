#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Clocked measurement of the interval between the reference edge and the latched edge.

A gated counter counts clock periods while the window is open. The signal
path lags the reference path by ``path_offset``, which shows up as a
systematic extra count. The counter saturates instead of wrapping.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.temporal import EdgeEvent
from utils.errors import DomainError, MeasurementError

# The clock control word spans two decades
MIN_PERIOD = 50e-9
MAX_PERIOD = 50e-6
BASE_PERIOD = 50e-9
MAX_CONTROL_WORD = 1000


class ClockConfig(BaseModel):
    """Counter clock and path settings."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    period: float = Field(500e-9, description="Clock period (s)")
    path_offset: float = Field(625e-9, description="Signal-path minus reference-path delay (s)")
    counter_bits: int = Field(16, ge=1, le=64)
    start_phase: float = Field(0.0, ge=0, description="Clock phase when the window opens (s)")
    randomize_phase: bool = Field(False, description="Draw start_phase uniformly per trial")

    @model_validator(mode="after")
    def _check_clock(self) -> "ClockConfig":
        if not MIN_PERIOD <= self.period <= MAX_PERIOD:
            raise ValueError(f"period {self.period} s outside [{MIN_PERIOD}, {MAX_PERIOD}] s")
        if self.start_phase >= self.period:
            raise ValueError("start_phase must be below one period")
        return self

    @property
    def max_count(self) -> int:
        return (1 << self.counter_bits) - 1

    @property
    def max_window(self) -> float:
        return self.max_count * self.period


@dataclass(frozen=True)
class CountResult:
    """Counter read-out for one trial."""
    count: int
    overflowed: bool
    period: float

    @property
    def inferred_time(self) -> float:
        return self.count * self.period


def quantize(t: float, period: float) -> int:
    """
    Number of whole periods in ``t`` (floor).

    The result k always satisfies k*period <= t < (k+1)*period in floating
    point, so exact multiples of the period count fully.
    """
    if t < 0:
        raise DomainError(f"cannot quantize a negative interval ({t} s)")
    if not period > 0:
        raise DomainError(f"period must be positive, got {period}")
    k = math.floor(t / period)
    if (k + 1) * period <= t:
        k += 1
    elif k * period > t:
        k -= 1
    return k


def measure_window(reference: EdgeEvent, latched: EdgeEvent, cfg: ClockConfig, phase: Optional[float] = None) -> CountResult:
    """
    Count clock periods between the reference edge and the latched edge.

    Args:
        reference: Edge that opens the window.
        latched: Edge that closes it (NEVER when the device never switched).
        cfg: Clock settings.
        phase: Clock phase at the window opening; defaults to cfg.start_phase.

    Returns:
        CountResult, saturated and flagged on overflow.

    Raises:
        MeasurementError: If the reference never arrives or the offset
            interval is negative.
    """
    if reference.is_never:
        raise MeasurementError("reference edge never arrived")
    if latched.is_never:
        return CountResult(count=cfg.max_count, overflowed=True, period=cfg.period)

    interval = (latched.time + cfg.path_offset) - reference.time
    if interval < 0:
        raise MeasurementError(f"negative counting window ({interval:.3e} s); check path_offset")

    phase = cfg.start_phase if phase is None else phase
    raw = quantize(interval + phase, cfg.period)
    if raw > cfg.max_count:
        return CountResult(count=cfg.max_count, overflowed=True, period=cfg.period)
    return CountResult(count=raw, overflowed=False, period=cfg.period)


def min_detectable_dwell(cfg: ClockConfig) -> float:
    """AP excursions shorter than one clock period are not seen by the counter."""
    return cfg.period


def period_from_control_word(word: int, base_period: float = BASE_PERIOD) -> float:
    """Clock period selected by a digital control word."""
    if not 1 <= word <= MAX_CONTROL_WORD:
        raise DomainError(f"control word must lie in [1, {MAX_CONTROL_WORD}], got {word}")
    return word * base_period


def split_count(count: int, widths: Sequence[int] = (8, 8)) -> Tuple[int, ...]:
    """Per-stage values of chained counters, lowest stage first."""
    if count < 0 or count >= 1 << sum(widths):
        raise DomainError(f"count {count} does not fit in {sum(widths)} bits")
    stages = []
    for width in widths:
        stages.append(count & ((1 << width) - 1))
        count >>= width
    return tuple(stages)


def join_count(stages: Sequence[int], widths: Sequence[int] = (8, 8)) -> int:
    """Inverse of split_count."""
    if len(stages) != len(widths):
        raise DomainError("one value per counter stage is required")
    count = 0
    shift = 0
    for value, width in zip(stages, widths):
        if not 0 <= value < 1 << width:
            raise DomainError(f"stage value {value} exceeds {width} bits")
        count |= value << shift
        shift += width
    return count
