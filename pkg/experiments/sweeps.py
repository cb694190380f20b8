"""
Mean switching time versus current.
"""

from typing import List, Optional, Sequence

from loguru import logger
from pydantic import BaseModel, ConfigDict

from configs.schema import ExperimentConfig
from core.device import check_breakdown, rate_from_current
from core.frontend import centered_hysteresis
from experiments.pipeline import censored_mean, measured_times, run_pdc_batch
from stats.distributions import fit_exponential
from stats.fitting import fit_tau_vs_current
from stats.reports import FitReport
from utils.errors import SmtjError


class SweepPoint(BaseModel):
    """Outcome at one current of a sweep."""
    model_config = ConfigDict(extra="forbid")

    current_uA: float
    mean_s: Optional[float] = None
    stderr_s: Optional[float] = None
    true_tau_s: float
    n_switched: int = 0
    n_overflowed: int = 0
    fit: Optional[FitReport] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.mean_s is not None


class SweepResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points: List[SweepPoint]
    combined: Optional[FitReport] = None
    combined_error: Optional[str] = None

    def rows(self):
        """(current_uA, mean_s, stderr_s) of the points that produced a mean."""
        return [(p.current_uA, p.mean_s, p.stderr_s) for p in self.points if p.ok]


def _measure_point(cfg: ExperimentConfig, current: float, batch: int) -> SweepPoint:
    point = SweepPoint(current_uA=current, true_tau_s=1.0 / rate_from_current(current, cfg.device))
    try:
        check_breakdown(current, cfg.device)
        hysteresis = cfg.hysteresis
        if cfg.sweep.center_window:
            hysteresis = centered_hysteresis(current, cfg.device.r_p, cfg.device.r_ap, cfg.hysteresis)
        records = run_pdc_batch(cfg, cfg.sweep.n_trials, current=current, batch=batch, hysteresis=hysteresis)
        mean, stderr, n_switched, n_over = censored_mean(records, cfg.timing)
        point = point.model_copy(update={
            "mean_s": mean, "stderr_s": stderr, "n_switched": n_switched, "n_overflowed": n_over,
        })
        point = point.model_copy(update={"fit": fit_exponential(measured_times(records, cfg.timing))})
    except SmtjError as e:
        logger.warning(f"[WARN] Sweep point failed | current_uA={current} | error={e}")
        point = point.model_copy(update={"error": str(e)})
    return point


def sweep_mean_vs_current(cfg: ExperimentConfig, currents: Optional[Sequence[float]] = None) -> SweepResult:
    """
    Measure a batch at each current, then fit the means to the current law.

    A failing current is recorded and skipped; a failing combined fit is
    recorded in ``combined_error``.
    """
    currents = list(cfg.sweep.currents_uA if currents is None else currents)
    points = [_measure_point(cfg, current, batch) for batch, current in enumerate(currents)]
    for p in points:
        if p.ok:
            logger.info(
                f"SWEEP_POINT | current_uA={p.current_uA} | mean_s={p.mean_s:.4e} | "
                f"stderr_s={p.stderr_s:.2e} | overflowed={p.n_overflowed}"
            )

    result = SweepResult(points=points)
    try:
        combined = fit_tau_vs_current(result.rows(), delta=cfg.device.delta, alpha=cfg.device.alpha)
        result = result.model_copy(update={"combined": combined})
        logger.info(f"SWEEP_FIT | reduced_chi2={combined.reduced_chi_squared:.2f} | n={combined.n_points}")
    except SmtjError as e:
        logger.warning(f"[WARN] Combined current-law fit failed: {e}")
        result = result.model_copy(update={"combined_error": str(e)})
    return result
