"""
Weighted nonlinear least squares for mean switching time versus current.

The model is log tau(I) = log tau0 + delta * (1 + I / i_c) ** alpha. With
alpha = 1 only two combinations of the three constants are identifiable
(intercept log tau0 + delta and slope delta / i_c), so delta is held fixed
and log tau0 and i_c are fitted.
"""

import math
from typing import Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import linalg, optimize, stats

from stats.reports import EXCESS_SCATTER_LIMIT, FitReport
from utils.errors import DataError, FitError

MIN_SWEEP_POINTS = 4
# Log-time slopes (per uA) below this count as no current dependence
FLAT_SLOPE = 1e-12

SweepPoint = Tuple[float, float, float]


def least_squares_covariance(result: optimize.OptimizeResult) -> np.ndarray:
    """
    Parameter covariance from the Jacobian of weighted residuals.

    Pseudo-inverse of J^T J via the SVD, dropping singular values below
    machine precision.
    """
    _, s, vt = linalg.svd(result.jac, full_matrices=False)
    threshold = np.finfo(float).eps * max(result.jac.shape) * s[0]
    s = s[s > threshold]
    vt = vt[:s.size]
    return np.dot(vt.T / s**2, vt)


def log_tau_model(currents, log_tau0: float, i_c: float, delta: float, alpha: float = 1.0) -> np.ndarray:
    base = 1.0 + np.asarray(currents, dtype=float) / i_c
    if alpha != 1.0:
        base = np.power(np.clip(base, 1e-12, None), alpha)
    return log_tau0 + delta * base


def _initial_guess(currents: np.ndarray, log_means: np.ndarray, log_errors: np.ndarray, delta: float):
    slope, intercept = np.polyfit(currents, log_means, 1, w=1.0 / log_errors)
    if abs(slope) < FLAT_SLOPE:
        raise FitError("switching time does not depend on current", {"slope": 0.0})
    return [intercept - delta, delta / slope]


def fit_tau_vs_current(points: Sequence[SweepPoint], delta: float = 20.0, alpha: float = 1.0) -> FitReport:
    """
    Fit mean switching times to the exponential current law.

    Args:
        points: (current_uA, mean_s, stderr_s) triples.
        delta: Barrier ratio held fixed during the fit.
        alpha: Exponent held fixed during the fit.

    Returns:
        FitReport with tau0, log_tau0 and i_c; delta and alpha under ``fixed``.

    Raises:
        FitError: Fewer than four points, a flat sweep, or no convergence.
        DataError: Non-positive means or errors.
    """
    if len(points) < MIN_SWEEP_POINTS:
        raise FitError(
            f"need at least {MIN_SWEEP_POINTS} sweep points", {"n_points": len(points)}
        )
    if not delta > 0:
        raise FitError("delta must be positive to fit the current law", {"delta": delta})

    data = np.asarray(points, dtype=float)
    currents, means, errors = data[:, 0], data[:, 1], data[:, 2]
    if np.any(means <= 0) or np.any(errors <= 0):
        raise DataError("sweep means and standard errors must be positive")
    if np.unique(currents).size < 3:
        raise FitError("sweep needs at least three distinct currents", {"distinct": int(np.unique(currents).size)})

    log_means = np.log(means)
    log_errors = errors / means

    def residuals(p):
        return (log_means - log_tau_model(currents, p[0], p[1], delta, alpha)) / log_errors

    x0 = _initial_guess(currents, log_means, log_errors, delta)
    result = optimize.least_squares(residuals, x0=x0, x_scale="jac", method="lm")
    if not result.success or not np.all(np.isfinite(result.x)):
        raise FitError(
            "current-law fit did not converge",
            {"status": result.status, "message": result.message, "nfev": result.nfev, "x": list(result.x)},
        )

    cov = least_squares_covariance(result)
    n_dof = currents.size - 2
    chi2 = float(np.sum(result.fun**2))
    reduced = chi2 / n_dof
    log_tau0, i_c = (float(v) for v in result.x)
    sigma_log_tau0 = math.sqrt(cov[0, 0])

    flags = []
    if reduced > EXCESS_SCATTER_LIMIT:
        flags.append("excess_scatter")
        logger.warning(f"[WARN] Current-law fit has excess scatter | reduced_chi2={reduced:.2f} | n={currents.size}")

    return FitReport(
        method="current_law_least_squares",
        parameters={"log_tau0": log_tau0, "tau0": math.exp(log_tau0), "i_c": i_c},
        uncertainties={
            "log_tau0": sigma_log_tau0,
            "tau0": math.exp(log_tau0) * sigma_log_tau0,
            "i_c": math.sqrt(cov[1, 1]),
        },
        fixed={"delta": delta, "alpha": alpha},
        reduced_chi_squared=reduced,
        n_points=int(currents.size),
        n_parameters=2,
        n_dof=n_dof,
        p_value=float(stats.chi2.sf(chi2, n_dof)),
        flags=flags,
    )


def predict_log_tau(report: FitReport, currents) -> np.ndarray:
    """Fitted log mean switching time at ``currents``."""
    return log_tau_model(
        currents,
        report.parameters["log_tau0"],
        report.parameters["i_c"],
        report.fixed["delta"],
        report.fixed.get("alpha", 1.0),
    )


def curve_rms_relative_error(report: FitReport, currents, true_log_tau) -> float:
    """RMS of (fitted - true) / true log mean time over ``currents``."""
    true_log_tau = np.asarray(true_log_tau, dtype=float)
    fitted = predict_log_tau(report, currents)
    return float(np.sqrt(np.mean(((fitted - true_log_tau) / true_log_tau) ** 2)))
