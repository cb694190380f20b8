# Analysis of switching-time samples

from .distributions import (
    EmpiricalCdf,
    Histogram,
    chi2_goodness_of_fit,
    chi2_two_sample,
    empirical_cdf,
    exponential_cdf,
    fit_cdf,
    fit_exponential,
    histogram_counting_errors,
    ks_test,
)
from .drift import drift_analysis
from .fitting import curve_rms_relative_error, fit_tau_vs_current, predict_log_tau
from .reports import DriftReport, FitReport

__all__ = [
    "EmpiricalCdf",
    "Histogram",
    "chi2_goodness_of_fit",
    "chi2_two_sample",
    "empirical_cdf",
    "exponential_cdf",
    "fit_cdf",
    "fit_exponential",
    "histogram_counting_errors",
    "ks_test",
    "drift_analysis",
    "curve_rms_relative_error",
    "fit_tau_vs_current",
    "predict_log_tau",
    "DriftReport",
    "FitReport",
]
