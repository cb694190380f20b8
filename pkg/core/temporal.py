#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Race-logic primitives.

Information is carried by the arrival time of a rising edge. An edge that
never arrives is NEVER, which orders after every finite time. Gates are
ideal: no propagation delay, no leakage.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from core.device import sample_dwell
from utils.errors import UsageError


@dataclass(frozen=True, order=True)
class EdgeEvent:
    """A rising edge at ``time`` seconds; math.inf encodes NEVER."""
    time: float

    def __post_init__(self):
        if math.isnan(self.time) or self.time < 0:
            raise ValueError(f"edge time must be >= 0 or NEVER, got {self.time}")

    @property
    def is_never(self) -> bool:
        return math.isinf(self.time)

    def __repr__(self) -> str:
        return "EdgeEvent(NEVER)" if self.is_never else f"EdgeEvent({self.time!r})"


NEVER = EdgeEvent(math.inf)


@dataclass(frozen=True)
class RaceOutcome:
    """Result of an n-way race; ``winner`` is -1 when every input is NEVER."""
    winner: int
    winner_time: EdgeEvent
    one_hot: Tuple[bool, ...]

    @property
    def has_winner(self) -> bool:
        return self.winner >= 0


def ddc(t0: float, delay: float) -> EdgeEvent:
    """Deterministic delay cell: an edge ``delay`` seconds after ``t0``."""
    if delay < 0:
        raise ValueError(f"delay must be non-negative, got {delay}")
    return EdgeEvent(t0 + delay)


def pdc(t0: float, lam: float, rng: np.random.Generator) -> EdgeEvent:
    """Probabilistic delay cell: an edge an Exp(lam) delay after ``t0``."""
    if not lam > 0:
        raise ValueError(f"rate must be positive, got {lam}")
    return EdgeEvent(t0 + sample_dwell(lam, rng))


def inhibit(i_edge: EdgeEvent, b_edge: EdgeEvent) -> EdgeEvent:
    """
    Inhibit gate: ``i_edge`` passes only if it strictly precedes ``b_edge``.

    Equal arrival blocks.
    """
    if i_edge.time < b_edge.time:
        return i_edge
    return NEVER


def or_race(edges: Sequence[EdgeEvent]) -> EdgeEvent:
    """OR gate on rising edges: the earliest arrival."""
    if not edges:
        raise UsageError("or_race needs at least one edge")
    return min(edges)


def one_hot_race(edges: Sequence[EdgeEvent]) -> RaceOutcome:
    """
    n-way race; the earliest edge wins, ties go to the lowest index.

    Returns:
        RaceOutcome with an all-false one_hot when every input is NEVER.
    """
    if not edges:
        raise UsageError("one_hot_race needs at least one edge")
    winner = min(range(len(edges)), key=lambda k: edges[k].time)
    first = edges[winner]
    if first.is_never:
        return RaceOutcome(winner=-1, winner_time=NEVER, one_hot=(False,) * len(edges))
    one_hot = tuple(k == winner for k in range(len(edges)))
    return RaceOutcome(winner=winner, winner_time=first, one_hot=one_hot)


def cross_coupled_pair(a: EdgeEvent, b: EdgeEvent) -> Tuple[EdgeEvent, EdgeEvent]:
    """
    Two inhibit gates, each blocked by the other's input.

    At an exact tie both outputs are blocked.
    """
    return inhibit(a, b), inhibit(b, a)


def race_network(edges: Sequence[EdgeEvent]) -> Tuple[EdgeEvent, ...]:
    """
    Gate-level n-way race: the OR of all inputs drives every inhibit B input.

    The OR output reaches the B inputs one float step after its own earliest
    input, so only the earliest input(s) pass. Simultaneous winners are
    resolved in the output word by index priority.
    """
    fired = or_race(edges)
    if fired.is_never:
        return tuple(NEVER for _ in edges)
    blocking = EdgeEvent(math.nextafter(fired.time, math.inf))
    passed = [inhibit(edge, blocking) for edge in edges]
    first = next(k for k, edge in enumerate(passed) if not edge.is_never)
    return tuple(edge if k == first else NEVER for k, edge in enumerate(passed))


def one_hot_word(outputs: Sequence[EdgeEvent]) -> Tuple[bool, ...]:
    """Which race outputs went high."""
    return tuple(not edge.is_never for edge in outputs)
