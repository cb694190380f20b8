"""
Metropolis-Hastings acceptance decided by a temporal race.

The energy change is embedded in time through a power scale W: a DDC fires
at dE/W and a PDC with rate W*beta fires at an exponential time. The
inhibit gate passes the PDC edge when it arrives first; the inverted output
is the acceptance bit, true with probability min(1, exp(-beta dE)).
"""

import math

import numpy as np

from core.temporal import ddc, inhibit, pdc
from utils.errors import DomainError


def acceptance_probability(delta_e: float, beta: float) -> float:
    """min(1, exp(-beta dE))."""
    x = beta * delta_e
    if x <= 0:
        return 1.0
    return math.exp(-x)


def mh_accept(delta_e: float, beta: float, w: float, rng: np.random.Generator, t0: float = 0.0) -> bool:
    """
    One acceptance decision.

    Args:
        delta_e: Energy change of the proposed move.
        beta: Inverse temperature.
        w: Power scale of the temporal embedding.
        rng: Random stream for the PDC.
        t0: Time at which both cells are triggered.

    Returns:
        True when the move is accepted.
    """
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if not w > 0:
        raise DomainError(f"w must be positive, got {w}")

    # An edge due before t0 fires at t0 and blocks with certainty.
    threshold = ddc(t0, max(delta_e / w, 0.0))
    passed = inhibit(pdc(t0, w * beta, rng), threshold)
    return passed.is_never
