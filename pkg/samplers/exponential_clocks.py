"""
Weighted random sampling with exponential clocks.

Each face of a die is a PDC with rate lambda_j; the first edge through the
one-hot race network names the face, so P(j) = lambda_j / sum(lambda).
Because the rates are exponential in current, addressing the devices with
currents gives a Boltzmann distribution P(j) ~ exp(-I_j / I_beta).
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.optimize import brentq

from core.device import DeviceParams, rate_from_current
from core.temporal import one_hot_race, pdc
from utils.errors import DomainError

# Relative tolerance for the log-linearity check of current addressing
BOLTZMANN_TOLERANCE = 1e-9


class WeightedDie(BaseModel):
    """An n-sided die whose faces are exponential clocks."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    rates: Tuple[float, ...] = Field(..., min_length=1, description="Clock rates (1/s)")
    currents: Optional[Tuple[float, ...]] = Field(None, description="Currents the rates came from (uA)")

    @field_validator("rates")
    @classmethod
    def _positive_finite(cls, rates: Tuple[float, ...]) -> Tuple[float, ...]:
        for rate in rates:
            if not (rate > 0 and math.isfinite(rate)):
                raise ValueError(f"rates must be positive and finite, got {rate}")
        return rates

    @property
    def n(self) -> int:
        return len(self.rates)

    def probabilities(self) -> np.ndarray:
        """Winning probability of each face."""
        rates = np.asarray(self.rates, dtype=float)
        return rates / rates.sum()

    def scaled(self, factor: float) -> "WeightedDie":
        if not factor > 0:
            raise DomainError(f"scale factor must be positive, got {factor}")
        return WeightedDie(rates=tuple(r * factor for r in self.rates))


def weighted_sample(die: WeightedDie, rng: np.random.Generator) -> int:
    """Roll the die once through the race network."""
    edges = [pdc(0.0, rate, rng) for rate in die.rates]
    return one_hot_race(edges).winner


def weighted_samples(die: WeightedDie, rng: np.random.Generator, size: int) -> np.ndarray:
    """
    Roll the die ``size`` times at once.

    Same law as weighted_sample; argmin keeps the lowest index on ties.
    """
    rates = np.asarray(die.rates, dtype=float)
    delays = -np.log(1.0 - rng.random((size, rates.size))) / rates
    return np.argmin(delays, axis=1)


def characteristic_current(params: DeviceParams) -> float:
    """
    Signed I_beta with P(j) ~ exp(-I_j / I_beta), exact for alpha = 1.

    Raises:
        DomainError: If alpha != 1 or the barrier is zero.
    """
    if params.alpha != 1.0:
        raise DomainError("a single characteristic current exists only for alpha = 1")
    if params.delta == 0:
        raise DomainError("rates do not depend on current when delta = 0")
    return params.i_c / params.delta


def boltzmann_fit(currents: Sequence[float], rates: Sequence[float]) -> Tuple[float, float]:
    """
    Fit log(rate) = a - I / I_beta.

    Returns:
        (I_beta, largest relative residual of the log-rates)
    """
    currents = np.asarray(currents, dtype=float)
    log_rates = np.log(np.asarray(rates, dtype=float))
    if currents.size < 2 or np.ptp(currents) == 0:
        return math.inf, 0.0
    slope, intercept = np.polyfit(currents, log_rates, 1)
    residual = log_rates - (intercept + slope * currents)
    scale = max(np.max(np.abs(log_rates)), 1.0)
    i_beta = -1.0 / slope if slope != 0 else math.inf
    return i_beta, float(np.max(np.abs(residual)) / scale)


def currents_to_rates(currents: Sequence[float], params: DeviceParams) -> WeightedDie:
    """
    Die whose faces are devices driven at ``currents``.

    The log-probabilities are checked to be linear in current (Boltzmann
    form); a deviation is logged, not raised, since alpha != 1 breaks it by
    construction.

    Raises:
        DomainError: If any current is outside the operating range.
    """
    for i in currents:
        if not params.in_operating_range(i):
            raise DomainError(f"current {i} uA outside operating range [{params.i_min}, {params.i_max}] uA")
    rates = [rate_from_current(i, params) for i in currents]

    i_beta, residual = boltzmann_fit(currents, rates)
    if residual > BOLTZMANN_TOLERANCE:
        logger.warning(f"[WARN] Current addressing deviates from Boltzmann form | residual={residual:.2e}")
    else:
        logger.debug(f"Current addressing is Boltzmann | I_beta={i_beta:.4g} uA")

    return WeightedDie(rates=tuple(rates), currents=tuple(float(i) for i in currents))


def currents_for_weights(weights: Sequence[float], params: DeviceParams, i_ref: float) -> List[float]:
    """
    Currents whose rates are proportional to ``weights``.

    The largest weight is assigned ``i_ref``; the others get the currents
    that scale the rate down by their weight ratio.

    Raises:
        DomainError: If a weight is not positive or a current leaves the operating range.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0 or np.any(weights <= 0):
        raise DomainError("weights must be positive")
    if not params.in_operating_range(i_ref):
        raise DomainError(f"reference current {i_ref} uA outside the operating range")
    ratios = weights / weights.max()
    ref_log_rate = math.log(rate_from_current(i_ref, params))

    if params.alpha == 1.0 and params.delta > 0:
        i_beta = characteristic_current(params)
        currents = [i_ref - i_beta * math.log(r) for r in ratios]
    else:
        currents = []
        for ratio in ratios:
            target = ref_log_rate + math.log(ratio)

            def gap(i, target=target):
                return math.log(rate_from_current(i, params)) - target

            if gap(params.i_min) > 0 or gap(i_ref) < 0:
                raise DomainError(f"weight ratio {ratio:.3g} not reachable inside the operating range")
            currents.append(brentq(gap, params.i_min, i_ref) if ratio < 1 else i_ref)

    for i in currents:
        if not params.in_operating_range(i):
            raise DomainError(f"weight needs current {i:.3f} uA outside the operating range")
    return currents
