#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Stochastic model of a superparamagnetic tunnel junction (SMTJ).

The device is a two-state exponential switcher. The mean dwell time in the
parallel state follows

    tau_P(I) = tau0 * exp[delta * (1 + I / i_c) ** alpha]

and the antiparallel state uses its own parameter set (by default the same
constants with the sign of i_c flipped). Times are float seconds, currents
are microamps.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from utils.errors import DomainError, UsageError

# Circular 150 nm junction, RA = 10 ohm um^2, TMR = 120 %
DEFAULT_R_P = 10.0 / (math.pi * 0.075**2)
DEFAULT_R_AP = DEFAULT_R_P * (1.0 + 1.2)

# MgO breakdown observed around this device voltage
BREAKDOWN_VOLTAGE = 0.7

# Grid used to check the sign convention over the operating range
_MONOTONIC_GRID = 65


class MagState(str, Enum):
    """Magnetization state; P is the low-resistance state."""
    P = "P"
    AP = "AP"

    def flipped(self) -> "MagState":
        return MagState.AP if self is MagState.P else MagState.P


class DeviceParams(BaseModel):
    """
    Constants of one SMTJ.

    ``i_min``/``i_max`` bound the operating current range in which the
    constructor checks that tau_P strictly decreases with current.
    ``ap_*`` override the antiparallel-state constants; left unset they
    mirror the parallel ones with i_c negated.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    tau0: float = Field(1e-9, gt=0, description="Characteristic time (s)")
    delta: float = Field(20.0, ge=0, description="Barrier ratio dE/kT")
    i_c: float = Field(-3000.0, description="Critical current (uA, signed)")
    alpha: float = Field(1.0, gt=0, description="Exponent on (1 + I/i_c)")
    r_p: float = Field(DEFAULT_R_P, gt=0, description="Parallel resistance (ohm)")
    r_ap: float = Field(DEFAULT_R_AP, gt=0, description="Antiparallel resistance (ohm)")
    i_min: float = Field(0.0, description="Operating range lower bound (uA)")
    i_max: float = Field(1500.0, description="Operating range upper bound (uA)")
    ap_tau0: Optional[float] = Field(None, gt=0)
    ap_delta: Optional[float] = Field(None, ge=0)
    ap_i_c: Optional[float] = None

    @model_validator(mode="after")
    def _check_invariants(self) -> "DeviceParams":
        if self.i_c == 0:
            raise ValueError("i_c must be non-zero")
        if self.ap_i_c is not None and self.ap_i_c == 0:
            raise ValueError("ap_i_c must be non-zero")
        if not self.r_ap > self.r_p:
            raise ValueError(f"r_ap ({self.r_ap}) must exceed r_p ({self.r_p})")
        if not self.i_max > self.i_min:
            raise ValueError(f"empty operating range [{self.i_min}, {self.i_max}]")

        currents = np.linspace(self.i_min, self.i_max, _MONOTONIC_GRID)
        with np.errstate(all="ignore"):
            exponents = self.delta * np.power(1.0 + currents / self.i_c, self.alpha)
        if not np.all(np.isfinite(exponents)):
            raise ValueError("tau_P(I) is undefined somewhere in the operating range")
        steps = np.diff(exponents)
        if self.delta > 0 and not np.all(steps < 0):
            raise ValueError(
                "tau_P(I) must strictly decrease with current over the operating range; "
                "check the sign of i_c"
            )
        return self

    def state_constants(self, state: MagState) -> Tuple[float, float, float]:
        """Return (tau0, delta, i_c) for one state."""
        if state is MagState.P:
            return self.tau0, self.delta, self.i_c
        return (
            self.ap_tau0 if self.ap_tau0 is not None else self.tau0,
            self.ap_delta if self.ap_delta is not None else self.delta,
            self.ap_i_c if self.ap_i_c is not None else -self.i_c,
        )

    def in_operating_range(self, i: float) -> bool:
        return self.i_min <= i <= self.i_max

    def resistance(self, state: MagState) -> float:
        return self.r_p if state is MagState.P else self.r_ap


class DriftModel(BaseModel):
    """
    Slow drift of the device rates.

    The log of both rates carries a common offset that follows a
    mean-reverting Gaussian (Ornstein-Uhlenbeck) process.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    enabled: bool = False
    correlation_time: float = Field(10.0, gt=0, description="Mean-reversion time (s)")
    log_amplitude: float = Field(0.07, ge=0, description="Stationary stddev of log-rate")


@dataclass(frozen=True)
class TelegraphTrace:
    """Alternating dwells of a random telegraph signal, starting at t = 0."""
    start_state: MagState
    dwells: Tuple[float, ...]
    total: float
    truncated: bool = True

    def __post_init__(self):
        if not self.dwells:
            raise ValueError("a telegraph trace needs at least one dwell")
        if min(self.dwells) <= 0:
            raise ValueError("all dwells must be positive")
        if abs(math.fsum(self.dwells) - self.total) > 1e-9 * self.total:
            raise ValueError(f"dwells sum to {math.fsum(self.dwells)}, expected {self.total}")

    def state_of(self, k: int) -> MagState:
        return self.start_state if k % 2 == 0 else self.start_state.flipped()

    def segments(self) -> Iterator[Tuple[float, float, MagState]]:
        """Yield (start_time, dwell, state) for every dwell."""
        t = 0.0
        for k, dwell in enumerate(self.dwells):
            yield t, dwell, self.state_of(k)
            t += dwell

    def dwells_in(self, state: MagState, complete_only: bool = True) -> np.ndarray:
        """Dwell durations spent in ``state``, optionally dropping the truncated tail."""
        first = 0 if self.start_state is state else 1
        values = np.asarray(self.dwells[first::2], dtype=float)
        last_is_state = self.state_of(len(self.dwells) - 1) is state
        if complete_only and self.truncated and last_is_state and values.size:
            values = values[:-1]
        return values

    def time_in(self, state: MagState) -> float:
        return float(np.sum(self.dwells_in(state, complete_only=False)))

    @property
    def n_transitions(self) -> int:
        return len(self.dwells) - 1


def rate_from_current(i: float, params: DeviceParams, state: MagState = MagState.P) -> float:
    """
    Switching rate out of ``state`` at current ``i``.

    Args:
        i: Current through the device (uA).
        params: Device constants.
        state: State being left; P by default.

    Returns:
        Rate in 1/s, strictly positive and finite.

    Raises:
        DomainError: If the exponential overflows or the law is undefined at ``i``.
    """
    tau0, delta, i_c = params.state_constants(state)
    base = 1.0 + i / i_c
    if base < 0 and params.alpha != 1.0:
        raise DomainError(f"(1 + I/i_c) is negative at I={i} uA; non-integer alpha is undefined")
    try:
        tau = tau0 * math.exp(delta * base**params.alpha)
    except OverflowError:
        raise DomainError(f"mean dwell time overflows at I={i} uA") from None
    if tau == 0.0 or not math.isfinite(tau):
        raise DomainError(f"switching rate is not finite at I={i} uA")
    rate = 1.0 / tau
    if rate == 0.0 or not math.isfinite(rate):
        raise DomainError(f"switching rate is not finite at I={i} uA")
    return rate


def mean_dwell(i: float, params: DeviceParams, state: MagState = MagState.P) -> float:
    """tau(I) = 1 / rate(I)."""
    return 1.0 / rate_from_current(i, params, state)


def dwell_from_uniform(u: float, lam: float) -> float:
    """Inverse transform: t = -ln(u) / lam for u in (0, 1]."""
    return -math.log(u) / lam


def sample_dwell(lam: float, rng: np.random.Generator) -> float:
    """
    Draw one Exp(lam) dwell.

    U is taken on (0, 1] so the logarithm is always finite.
    """
    return dwell_from_uniform(1.0 - rng.random(), lam)


def sample_dwells(lam: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vector version of sample_dwell."""
    return -np.log(1.0 - rng.random(size)) / lam


def inverse_cdf(p: float, lam: float) -> float:
    """Time t with F(t) = 1 - exp(-lam t) = p."""
    if not 0.0 <= p < 1.0:
        raise DomainError(f"probability must lie in [0, 1), got {p}")
    return -math.log1p(-p) / lam


def median_delay(lam: float) -> float:
    """Half of all delays fall below tau * ln 2."""
    return math.log(2.0) / lam


def stationary_offset(drift: DriftModel, rng: np.random.Generator) -> float:
    """Draw a log-rate offset from the drift process's stationary law."""
    if not drift.enabled or drift.log_amplitude == 0.0:
        return 0.0
    return drift.log_amplitude * float(rng.standard_normal())


def drift_log_rate(drift: DriftModel, previous: float, elapsed: float, rng: np.random.Generator) -> float:
    """
    Advance the log-rate offset by ``elapsed`` seconds.

    Exact Ornstein-Uhlenbeck transition: the offset decays towards 0 with
    time constant ``correlation_time`` and keeps stationary stddev
    ``log_amplitude``.
    """
    if not drift.enabled:
        raise UsageError("drift_log_rate called with drift disabled")
    decay = math.exp(-elapsed / drift.correlation_time)
    spread = drift.log_amplitude * math.sqrt(max(0.0, 1.0 - decay * decay))
    if spread == 0.0:
        return previous * decay
    return previous * decay + spread * float(rng.standard_normal())


def generate_telegraph(
    params: DeviceParams,
    i: float,
    duration: float,
    drift: DriftModel,
    rng: np.random.Generator,
    start_state: MagState = MagState.P,
    initial_offset: Optional[float] = None,
) -> TelegraphTrace:
    """
    Simulate the telegraph signal of a device held at current ``i``.

    Each dwell is exponential with the rate of its state. With drift
    enabled both log-rates carry the same offset, advanced at every
    transition. The dwell crossing ``duration`` is truncated there.

    Args:
        params: Device constants.
        i: Current (uA).
        duration: Observation window (s).
        drift: Drift process settings.
        rng: Random stream owned by this trace.
        start_state: State at t = 0.
        initial_offset: Starting log-rate offset; None draws it from the
            stationary law when drift is enabled.

    Returns:
        The TelegraphTrace.
    """
    if not duration > 0:
        raise DomainError(f"duration must be positive, got {duration}")

    base_rates = {
        MagState.P: rate_from_current(i, params, MagState.P),
        MagState.AP: rate_from_current(i, params, MagState.AP),
    }
    offset = 0.0
    if drift.enabled:
        offset = stationary_offset(drift, rng) if initial_offset is None else float(initial_offset)

    state = start_state
    elapsed = 0.0
    dwells = []
    while True:
        lam = base_rates[state] * math.exp(offset) if drift.enabled else base_rates[state]
        dwell = sample_dwell(lam, rng)
        while dwell <= 0.0:
            dwell = sample_dwell(lam, rng)

        if elapsed + dwell >= duration:
            tail = duration - elapsed
            if tail > 0.0:
                dwells.append(tail)
            break

        dwells.append(dwell)
        elapsed += dwell
        state = state.flipped()
        if drift.enabled:
            offset = drift_log_rate(drift, offset, dwell, rng)

    return TelegraphTrace(start_state=start_state, dwells=tuple(dwells), total=duration)


def check_breakdown(i: float, params: DeviceParams, limit: float = BREAKDOWN_VOLTAGE) -> bool:
    """
    Warn when the parallel-state device voltage exceeds the MgO breakdown level.

    Returns:
        True when the operating point is below ``limit``.
    """
    voltage = abs(i) * 1e-6 * params.r_p
    if voltage > limit:
        logger.warning(f"[WARN] Device voltage {voltage:.3f} V at I={i} uA exceeds the {limit} V breakdown level")
        return False
    return True
