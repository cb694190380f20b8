"""
Exponential-distribution analysis: MLE and log-histogram fits, empirical CDF,
histograms with counting errors, Kolmogorov-Smirnov and chi-squared tests.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import optimize, stats

from stats.fitting import least_squares_covariance
from stats.reports import EXCESS_SCATTER_LIMIT, FitReport
from utils.errors import DataError, FitError

MIN_SAMPLES = 10
HISTOGRAM_QUANTILE = 0.99
DEFAULT_BINS = 50
# Two fitted parameters need at least one spare bin
MIN_FIT_BINS = 3
# CDF fits are evaluated on at most this many quantile points
CDF_FIT_POINTS = 200


def _as_samples(samples: Sequence[float], positive: bool = True) -> np.ndarray:
    values = np.asarray(samples, dtype=float).ravel()
    if values.size < MIN_SAMPLES:
        raise DataError(f"need at least {MIN_SAMPLES} samples, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise DataError("samples must be finite")
    if positive and np.any(values <= 0):
        raise DataError(f"samples must be positive; smallest is {values.min()}")
    return values


@dataclass(frozen=True)
class Histogram:
    """Uniform bins with sqrt(N) counting errors."""
    edges: np.ndarray
    counts: np.ndarray
    errors: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    def rows(self) -> List[Tuple[float, int, float]]:
        """(bin_center_s, count, error) rows."""
        return [(float(c), int(n), float(e)) for c, n, e in zip(self.centers, self.counts, self.errors)]


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step CDF of a sample."""
    t: np.ndarray
    f: np.ndarray

    def evaluate(self, t) -> np.ndarray:
        return np.searchsorted(self.t, np.asarray(t, dtype=float), side="right") / self.t.size

    def rows(self) -> List[Tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.t, self.f)]


def histogram_counting_errors(samples: Sequence[float], n_bins: int = DEFAULT_BINS) -> Histogram:
    """
    Histogram over [0, 0.99-quantile] with per-bin error sqrt(count).

    Empty bins get an error of one count.
    """
    if n_bins < 2:
        raise DataError(f"need at least two bins, got {n_bins}")
    values = np.asarray(samples, dtype=float).ravel()
    if values.size == 0:
        raise DataError("cannot histogram an empty sample")
    upper = float(np.quantile(values, HISTOGRAM_QUANTILE))
    if upper <= 0:
        upper = float(values.max()) if values.max() > 0 else 1.0
    counts, edges = np.histogram(values, bins=n_bins, range=(0.0, upper))
    errors = np.sqrt(np.maximum(counts, 1))
    return Histogram(edges=edges, counts=counts, errors=errors)


def fit_log_histogram(hist: Histogram) -> Tuple[float, float, float, float, int]:
    """
    Weighted straight-line fit on a log scale: counts = A exp(-lambda t).

    Returns:
        (lambda, lambda_err, log_A, reduced_chi_squared, n_points)
    """
    t = hist.centers
    counts = hist.counts.astype(float)
    sigma = hist.errors
    used = counts > 0
    if used.sum() < 3:
        raise FitError("too few populated bins for a log-histogram fit", {"populated_bins": int(used.sum())})

    slope, intercept = np.polyfit(t[used], np.log(counts[used]), 1, w=np.sqrt(counts[used]))

    def residuals(p):
        return (counts - np.exp(p[0] - p[1] * t)) / sigma

    result = optimize.least_squares(residuals, x0=[intercept, -slope], method="lm")
    if not result.success:
        raise FitError("log-histogram fit did not converge", {"status": result.status, "message": result.message})
    cov = least_squares_covariance(result)
    n_dof = t.size - 2
    chi2 = float(np.sum(result.fun**2))
    return float(result.x[1]), float(math.sqrt(cov[1, 1])), float(result.x[0]), chi2 / n_dof, int(t.size)


def fit_exponential(samples: Sequence[float], n_bins: int = DEFAULT_BINS) -> FitReport:
    """
    Maximum-likelihood rate plus the log-histogram straight-line fit.

    lambda_hat = 1 / mean with standard error lambda_hat / sqrt(N); the
    reduced chi-squared comes from the weighted fit of the histogram.
    """
    if n_bins < MIN_FIT_BINS:
        raise DataError(f"need at least {MIN_FIT_BINS} bins for the histogram fit, got {n_bins}")
    values = _as_samples(samples)
    n = values.size
    lam = 1.0 / float(np.mean(values))
    hist = histogram_counting_errors(values, n_bins)

    params = {"lambda": lam, "tau": 1.0 / lam}
    errors = {"lambda": lam / math.sqrt(n), "tau": 1.0 / (lam * math.sqrt(n))}
    chi2 = None
    flags = []
    try:
        hist_lam, hist_err, log_amp, chi2, _ = fit_log_histogram(hist)
        params.update({"histogram_lambda": hist_lam, "histogram_log_amplitude": log_amp})
        errors["histogram_lambda"] = hist_err
    except FitError as e:
        flags.append(f"histogram_fit_failed: {e}")
    if chi2 is not None and chi2 > EXCESS_SCATTER_LIMIT:
        flags.append("excess_scatter")

    return FitReport(
        method="exponential_mle+log_histogram",
        parameters=params,
        uncertainties=errors,
        reduced_chi_squared=chi2,
        n_points=n_bins,
        n_parameters=2,
        n_dof=n_bins - 2,
        n_samples=n,
        flags=flags,
    )


def empirical_cdf(samples: Sequence[float]) -> EmpiricalCdf:
    values = np.sort(_as_samples(samples, positive=False))
    return EmpiricalCdf(t=values, f=np.arange(1, values.size + 1) / values.size)


def exponential_cdf(t, lam: float) -> np.ndarray:
    """F(t) = 1 - exp(-lambda t), zero for t < 0."""
    t = np.asarray(t, dtype=float)
    return np.where(t > 0, -np.expm1(-lam * np.clip(t, 0.0, None)), 0.0)


def fit_cdf(samples: Sequence[float]) -> FitReport:
    """
    Least-squares fit of F(t) = 1 - exp(-lambda t) to the empirical CDF.

    The CDF is evaluated at up to CDF_FIT_POINTS sample quantiles with
    binomial errors sqrt(F(1-F)/N); neighbouring points are correlated, so
    the chi-squared is indicative only. The quoted uncertainty is the
    Fisher bound lambda / sqrt(N).
    """
    values = _as_samples(samples)
    ecdf = empirical_cdf(values)
    n = values.size
    picks = np.unique(np.linspace(0, n - 1, min(n, CDF_FIT_POINTS)).astype(int))
    t = ecdf.t[picks]
    f = ecdf.f[picks]
    sigma = np.sqrt(np.maximum(f * (1.0 - f), 1.0 / n) / n)

    lam0 = 1.0 / float(np.mean(values))

    def residuals(p):
        return (f - exponential_cdf(t, p[0])) / sigma

    result = optimize.least_squares(residuals, x0=[lam0], bounds=([0.0], [np.inf]))
    if not result.success:
        raise FitError("CDF fit did not converge", {"status": result.status, "message": result.message})
    lam = float(result.x[0])
    n_dof = t.size - 1
    chi2 = float(np.sum(result.fun**2)) / n_dof
    return FitReport(
        method="cdf_least_squares",
        parameters={"lambda": lam, "tau": 1.0 / lam},
        uncertainties={"lambda": lam / math.sqrt(n), "tau": 1.0 / (lam * math.sqrt(n))},
        reduced_chi_squared=chi2,
        n_points=int(t.size),
        n_parameters=1,
        n_dof=n_dof,
        n_samples=n,
    )


def ks_test(samples: Sequence[float], lam: float) -> Tuple[float, float]:
    """
    One-sample Kolmogorov-Smirnov test against Exp(lambda).

    Returns:
        (statistic, asymptotic p-value)
    """
    if not lam > 0:
        raise DataError(f"rate must be positive, got {lam}")
    values = _as_samples(samples, positive=False)
    result = stats.kstest(values, "expon", args=(0.0, 1.0 / lam), method="asymp")
    return float(result.statistic), float(result.pvalue)


def chi2_goodness_of_fit(counts: Sequence[int], expected_p: Sequence[float]) -> Tuple[float, float]:
    """Pearson chi-squared of observed counts against probabilities."""
    counts = np.asarray(counts, dtype=float)
    expected_p = np.asarray(expected_p, dtype=float)
    if counts.size != expected_p.size or counts.size < 2:
        raise DataError("counts and probabilities must match and cover at least two categories")
    expected = expected_p / expected_p.sum() * counts.sum()
    result = stats.chisquare(counts, f_exp=expected)
    return float(result.statistic), float(result.pvalue)


def chi2_two_sample(counts_a: Sequence[int], counts_b: Sequence[int]) -> Tuple[float, float]:
    """Chi-squared test that two count vectors come from one distribution."""
    table = np.vstack([np.asarray(counts_a, dtype=float), np.asarray(counts_b, dtype=float)])
    if table.shape[1] < 2:
        raise DataError("need at least two categories")
    table = table[:, table.sum(axis=0) > 0]
    statistic, p_value, _, _ = stats.chi2_contingency(table, correction=False)
    return float(statistic), float(p_value)
