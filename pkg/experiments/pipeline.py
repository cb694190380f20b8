"""
Probabilistic delay cell measurement pipeline.

One trial steps the current on at t = 0, lets the device switch, digitises
the telegraph signal, latches the first surviving rising edge and counts
clock periods against the reference edge. Every trial owns a random stream
derived from (seed, batch, trial index), so trials can run in any order or
in parallel and still reproduce.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from configs.schema import ExperimentConfig
from core.device import MagState, drift_log_rate, generate_telegraph, stationary_offset
from core.frontend import (
    HysteresisConfig,
    digitize,
    reference_edge,
    sr_latch,
    suppress_short_pulses,
    transconductance_current,
)
from core.timing import ClockConfig, CountResult, measure_window, min_detectable_dwell
from utils.errors import DataError
from utils.rng import DRIFT_STREAM, PHASE_STREAM, derive_stream, trial_stream

# Trials handed to a worker process at a time
CHUNK_SIZE = 256


def step_current(cfg: ExperimentConfig) -> float:
    """Histogram-run current: the configured value, else what the transconductance stage sources."""
    if cfg.pdc.current_uA is not None:
        return cfg.pdc.current_uA
    return transconductance_current(cfg.transconductance)


@dataclass(frozen=True)
class TrialRecord:
    """Ground truth and measurement of one trial."""
    trial_index: int
    current_uA: float
    true_time: float
    latched_time: float
    result: CountResult

    @property
    def inferred_time(self) -> float:
        return self.result.inferred_time

    @property
    def overflowed(self) -> bool:
        return self.result.overflowed


def run_pdc_trial(
    cfg: ExperimentConfig,
    trial_index: int,
    current: Optional[float] = None,
    batch: int = 0,
    hysteresis: Optional[HysteresisConfig] = None,
    log_offset: Optional[float] = None,
) -> TrialRecord:
    """
    Simulate and measure one switching event.

    Args:
        cfg: Experiment configuration.
        trial_index: Index of the trial within its batch.
        current: Step current (uA); defaults to cfg.pdc.current_uA.
        batch: Batch number, part of the stream key.
        hysteresis: Comparator settings; defaults to cfg.hysteresis.
        log_offset: Drift offset of the log-rate at the step.

    Returns:
        TrialRecord. A device that does not switch inside the counter range
        gives an overflowed count, not an error.
    """
    current = step_current(cfg) if current is None else current
    hysteresis = cfg.hysteresis if hysteresis is None else hysteresis
    clock = cfg.timing
    rng = trial_stream(cfg.seed, trial_index, batch)

    trace = generate_telegraph(
        cfg.device, current, clock.max_window, cfg.drift, rng,
        start_state=MagState.P, initial_offset=log_offset,
    )
    true_time = trace.dwells[0] if len(trace.dwells) > 1 else math.inf

    edges = digitize(trace, current, cfg.device.r_p, cfg.device.r_ap, hysteresis)
    edges = suppress_short_pulses(edges, max(hysteresis.response_time, min_detectable_dwell(clock)))
    latched = sr_latch(edges)

    phase = None
    if clock.randomize_phase:
        phase = float(derive_stream(cfg.seed, PHASE_STREAM, batch, trial_index).uniform(0.0, clock.period))
    result = measure_window(reference_edge(0.0, cfg.reference), latched, clock, phase)

    return TrialRecord(
        trial_index=trial_index,
        current_uA=current,
        true_time=true_time,
        latched_time=latched.time,
        result=result,
    )


def lab_clock_offsets(cfg: ExperimentConfig, n_trials: int, batch: int = 0) -> Optional[List[float]]:
    """
    Drift offsets seen by consecutive trials of a batch, or None without drift.

    Trials are spaced ``trial_spacing_s`` apart on one Ornstein-Uhlenbeck path.
    """
    if not cfg.drift.enabled:
        return None
    rng = derive_stream(cfg.seed, DRIFT_STREAM, batch)
    offset = stationary_offset(cfg.drift, rng)
    offsets = []
    for _ in range(n_trials):
        offsets.append(offset)
        offset = drift_log_rate(cfg.drift, offset, cfg.trial_spacing_s, rng)
    return offsets


def _trial_from_args(cfg, current, batch, hysteresis, args: Tuple[int, Optional[float]]) -> TrialRecord:
    index, offset = args
    return run_pdc_trial(cfg, index, current, batch, hysteresis, offset)


def run_pdc_batch(
    cfg: ExperimentConfig,
    n_trials: int,
    current: Optional[float] = None,
    batch: int = 0,
    hysteresis: Optional[HysteresisConfig] = None,
    workers: Optional[int] = None,
) -> List[TrialRecord]:
    """
    Run ``n_trials`` trials, ordered by trial index.

    With more than one worker the trials are spread over processes; the
    records are identical to a serial run.
    """
    if n_trials < 1:
        raise DataError(f"n_trials must be >= 1, got {n_trials}")
    current = step_current(cfg) if current is None else current
    workers = cfg.workers if workers is None else workers

    offsets = lab_clock_offsets(cfg, n_trials, batch) or [None] * n_trials
    jobs = list(enumerate(offsets))
    run = partial(_trial_from_args, cfg, current, batch, hysteresis)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run, jobs, chunksize=CHUNK_SIZE))
    else:
        records = [run(job) for job in jobs]

    overflowed = sum(r.overflowed for r in records)
    logger.debug(
        f"TRIAL_BATCH | current_uA={current} | batch={batch} | n={n_trials} | "
        f"overflowed={overflowed} | workers={workers}"
    )
    return records


def measured_times(records: Sequence[TrialRecord], clock: ClockConfig) -> np.ndarray:
    """
    Switching times recovered from the counts of non-overflowed trials.

    Removes the path offset and, for a fixed clock phase, the average
    floor-quantisation loss of half a period. Non-positive estimates are
    dropped.
    """
    counts = np.array([r.result.count for r in records if not r.overflowed], dtype=float)
    times = counts * clock.period - clock.path_offset
    if not clock.randomize_phase:
        times += clock.period / 2.0 - clock.start_phase
    kept = times[times > 0]
    if kept.size < times.size:
        logger.warning(f"[WARN] Dropped {times.size - kept.size} non-positive switching times")
    return kept


def censored_mean(records: Sequence[TrialRecord], clock: ClockConfig) -> Tuple[float, float, int, int]:
    """
    Mean switching time with overflowed trials treated as censored.

    Exponential maximum likelihood: total observed time over the number of
    switches, with standard error mean / sqrt(switches).

    Returns:
        (mean_s, stderr_s, n_switched, n_overflowed)

    Raises:
        DataError: If no trial switched inside the counter range.
    """
    times = measured_times(records, clock)
    n_over = sum(r.overflowed for r in records)
    if times.size == 0:
        raise DataError(f"no switching events among {len(records)} trials")
    censor_at = clock.max_window - clock.path_offset
    mean = (float(np.sum(times)) + n_over * censor_at) / times.size
    return mean, mean / math.sqrt(times.size), int(times.size), int(n_over)
