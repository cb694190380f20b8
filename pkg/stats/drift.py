"""
Long-term stability of the AP dwell time.

A run is split into successive windows; if the device is stationary the
spread of the per-window mean AP dwells matches their standard errors and
the ratio of the two is close to 1. Slow drift of the switching rate
inflates the ratio.
"""

from typing import Optional, Sequence, Union

import numpy as np

from core.device import MagState, TelegraphTrace
from stats.reports import DriftReport
from utils.errors import DataError

MIN_EVENTS_PER_BIN = 30


def _ap_segments(trace: TelegraphTrace):
    """(start, dwell) arrays of AP dwells, plus the flag of the final one being cut."""
    starts, dwells = [], []
    for start, dwell, state in trace.segments():
        if state is MagState.AP:
            starts.append(start)
            dwells.append(dwell)
    last_is_ap = trace.state_of(len(trace.dwells) - 1) is MagState.AP if trace.dwells else False
    return np.asarray(starts), np.asarray(dwells), last_is_ap and trace.truncated


def _ap_time_before(edges: np.ndarray, starts: np.ndarray, dwells: np.ndarray) -> np.ndarray:
    """Cumulative time spent in AP up to each of ``edges``."""
    if starts.size == 0:
        return np.zeros_like(edges)
    ends = starts + dwells
    cumulative = np.concatenate([[0.0], np.cumsum(dwells)])
    k = np.searchsorted(ends, edges, side="right")
    partial = np.zeros_like(edges)
    inside = k < starts.size
    partial[inside] = np.clip(edges[inside] - starts[k[inside]], 0.0, dwells[k[inside]])
    return cumulative[k] + partial


def _windowed(trace: TelegraphTrace, n_bins: int):
    starts, dwells, cut = _ap_segments(trace)
    complete = slice(None, -1) if cut else slice(None)
    edges = np.linspace(0.0, trace.total, n_bins + 1)
    occupancy = np.diff(_ap_time_before(edges, starts, dwells)) / np.diff(edges)

    which = np.clip(np.searchsorted(edges, starts[complete], side="right") - 1, 0, n_bins - 1)
    groups = [dwells[complete][which == b] for b in range(n_bins)]
    return groups, occupancy.tolist()


def drift_analysis(
    source: Union[TelegraphTrace, Sequence[float]],
    n_bins: int = 30,
    min_events: int = MIN_EVENTS_PER_BIN,
) -> DriftReport:
    """
    Compare the spread of per-window mean AP dwells with their standard errors.

    Args:
        source: A telegraph trace (binned into equal time windows, with AP
            occupancy per window) or a stream of AP dwells in time order
            (split into equal-count windows).
        n_bins: Number of windows.
        min_events: Smallest allowed number of AP dwells per window.

    Returns:
        DriftReport.

    Raises:
        DataError: Fewer than two windows, or a window with too few events.
    """
    if n_bins < 2:
        raise DataError(f"drift analysis needs at least two windows, got {n_bins}")

    occupancy: Optional[list] = None
    if isinstance(source, TelegraphTrace):
        groups, occupancy = _windowed(source, n_bins)
    else:
        dwells = np.asarray(source, dtype=float).ravel()
        if np.any(dwells <= 0):
            raise DataError("AP dwells must be positive")
        groups = np.array_split(dwells, n_bins)

    counts = [int(g.size) for g in groups]
    if min(counts) < min_events:
        raise DataError(
            f"window with {min(counts)} AP dwells; need at least {min_events} per window "
            f"(windows={n_bins}, total={sum(counts)})"
        )

    means = np.array([g.mean() for g in groups])
    stderrs = np.array([g.std(ddof=1) / np.sqrt(g.size) for g in groups])
    spread = float(np.std(means, ddof=1))
    mean_se = float(np.mean(stderrs))

    return DriftReport(
        bin_means=means.tolist(),
        bin_stderrs=stderrs.tolist(),
        events_per_bin=counts,
        ap_fraction=occupancy,
        mean_of_standard_errors=mean_se,
        spread_of_means=spread,
        ratio=spread / mean_se,
    )
