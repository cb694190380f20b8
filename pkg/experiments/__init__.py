# End-to-end experiments and the command-line interface

from .cli import cli_dispatch
from .pipeline import TrialRecord, censored_mean, lab_clock_offsets, measured_times, run_pdc_batch, run_pdc_trial
from .sweeps import SweepPoint, SweepResult, sweep_mean_vs_current

__all__ = [
    "cli_dispatch",
    "TrialRecord",
    "censored_mean",
    "lab_clock_offsets",
    "measured_times",
    "run_pdc_batch",
    "run_pdc_trial",
    "SweepPoint",
    "SweepResult",
    "sweep_mean_vs_current",
]
