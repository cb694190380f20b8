"""
Boolean samplers built from one inhibit gate.

A probabilistic delay cell races a deterministic delay cell (or a second
probabilistic cell); which edge arrives first decides the bit.
"""

import math

import numpy as np

from core.device import inverse_cdf
from core.temporal import cross_coupled_pair, ddc, inhibit, pdc
from utils.errors import DomainError


def temporal_bernoulli(p: float, tau: float, rng: np.random.Generator) -> bool:
    """
    Bit that is true with probability ``p``.

    The PDC edge (mean delay ``tau``) passes the inhibit gate only when it
    beats the DDC edge at T_D = -tau ln(1 - p).

    Raises:
        DomainError: For p outside [0, 1) or non-positive tau.
    """
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    lam = 1.0 / tau
    t_d = inverse_cdf(p, lam)
    out = inhibit(pdc(0.0, lam, rng), ddc(0.0, t_d))
    return not out.is_never


def bernoulli_delay(p: float, tau: float) -> float:
    """The DDC delay temporal_bernoulli uses for probability ``p``."""
    return inverse_cdf(p, 1.0 / tau)


def biased_coin(lambda_a: float, lambda_b: float, rng: np.random.Generator) -> bool:
    """
    Two cross-coupled PDCs; true when A fires first.

    True with probability lambda_a / (lambda_a + lambda_b).
    """
    if not (lambda_a > 0 and lambda_b > 0) or math.isinf(lambda_a) or math.isinf(lambda_b):
        raise DomainError(f"rates must be positive and finite, got {lambda_a}, {lambda_b}")
    out_a, _ = cross_coupled_pair(pdc(0.0, lambda_a, rng), pdc(0.0, lambda_b, rng))
    return not out_a.is_never
