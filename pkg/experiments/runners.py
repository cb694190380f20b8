"""
One runner per CLI subcommand.

Each runner takes a validated config, an output directory and a table
format, writes its files and returns (written paths, summary dict).
"""

from pathlib import Path
from typing import Callable, Dict, List, Tuple

import numpy as np
from loguru import logger

from configs.schema import ExperimentConfig
from core.device import MagState, generate_telegraph, mean_dwell
from experiments.pipeline import measured_times, run_pdc_batch
from experiments.sweeps import sweep_mean_vs_current
from samplers.exponential_clocks import WeightedDie, currents_to_rates, weighted_samples
from samplers.ising import (
    IsingProblem,
    chain_distribution,
    enumerate_boltzmann,
    ferromagnetic_grid,
    ising_mh_chain,
    random_couplings,
    total_variation,
)
from stats.distributions import (
    chi2_goodness_of_fit,
    chi2_two_sample,
    empirical_cdf,
    exponential_cdf,
    fit_cdf,
    fit_exponential,
    histogram_counting_errors,
    ks_test,
)
from stats.drift import drift_analysis
from utils.logging_config import timed_operation
from utils.output import write_json, write_table
from utils.rng import CHAIN_STREAM, DRIFT_STREAM, SAMPLER_STREAM, derive_stream

RunnerResult = Tuple[List[Path], Dict]


@timed_operation("pdc-histogram")
def run_pdc_histogram(cfg: ExperimentConfig, out_dir: Path, fmt: str = "csv") -> RunnerResult:
    """Switching-time histogram at one current, exponential fit and KS test."""
    records = run_pdc_batch(cfg, cfg.pdc.n_trials)
    times = measured_times(records, cfg.timing)
    report = fit_exponential(times, cfg.pdc.n_bins)
    statistic, p_value = ks_test(times, report.parameters["lambda"])
    report = report.model_copy(update={"p_value": p_value})
    hist = histogram_counting_errors(times, cfg.pdc.n_bins)

    outputs = [
        write_table(out_dir / "histogram.csv", ("bin_center_s", "count", "error"), hist.rows(), fmt),
        write_table(
            out_dir / "trials.csv",
            ("trial_index", "true_time_s", "count", "overflowed", "inferred_time_s"),
            [(r.trial_index, r.true_time, r.result.count, int(r.overflowed), r.inferred_time) for r in records],
            fmt,
        ),
        write_json(out_dir / "fit.json", {"fit": report, "ks_statistic": statistic, "ks_p_value": p_value}),
    ]
    summary = {
        "lambda": report.parameters["lambda"],
        "reduced_chi_squared": report.reduced_chi_squared,
        "ks_p_value": p_value,
        "overflowed": sum(r.overflowed for r in records),
    }
    return outputs, summary


@timed_operation("cdf")
def run_cdf(cfg: ExperimentConfig, out_dir: Path, fmt: str = "csv") -> RunnerResult:
    """Empirical CDFs at several currents with Eq. 1 least-squares fits."""
    outputs: List[Path] = []
    fits = []
    for batch, current in enumerate(cfg.pdc.cdf_currents_uA):
        records = run_pdc_batch(cfg, cfg.pdc.n_trials, current=current, batch=batch)
        times = measured_times(records, cfg.timing)
        report = fit_cdf(times)
        lam = report.parameters["lambda"]
        _, p_value = ks_test(times, lam)
        report = report.model_copy(update={"p_value": p_value})
        ecdf = empirical_cdf(times)
        rows = [(t, f, float(exponential_cdf(t, lam))) for t, f in ecdf.rows()]
        outputs.append(write_table(out_dir / f"cdf_{batch}.csv", ("t_s", "F_empirical", "F_fit"), rows, fmt))
        fits.append({"current_uA": current, "fit": report})
        logger.info(f"CDF_FIT | current_uA={current} | lambda={lam:.4g} | ks_p={p_value:.3f}")

    lambdas = [f["fit"].parameters["lambda"] for f in fits]
    ordered = all(a < b for a, b in zip(lambdas, lambdas[1:]))
    outputs.append(write_json(out_dir / "fit.json", {"fits": fits, "lambda_increasing": ordered}))
    return outputs, {"lambdas": lambdas, "lambda_increasing": ordered}


@timed_operation("mean-vs-current")
def run_mean_vs_current(cfg: ExperimentConfig, out_dir: Path, fmt: str = "csv") -> RunnerResult:
    """Current sweep and combined fit of the exponential current law."""
    result = sweep_mean_vs_current(cfg)
    outputs = [
        write_table(out_dir / "sweep.csv", ("current_uA", "mean_s", "stderr_s"), result.rows(), fmt),
        write_json(out_dir / "fit.json", result),
    ]
    summary = {
        "points": len(result.rows()),
        "reduced_chi_squared": result.combined.reduced_chi_squared if result.combined else None,
        "combined_error": result.combined_error,
    }
    return outputs, summary


def _die_from_config(cfg: ExperimentConfig) -> WeightedDie:
    if cfg.sampling.currents_uA is not None:
        return currents_to_rates(cfg.sampling.currents_uA, cfg.device)
    return WeightedDie(rates=tuple(cfg.sampling.rates))


@timed_operation("weighted-sample")
def run_weighted_sample(cfg: ExperimentConfig, out_dir: Path, fmt: str = "csv") -> RunnerResult:
    """Exponential-clock die rolls, goodness of fit and the scale-invariance check."""
    die = _die_from_config(cfg)
    n = cfg.sampling.n_samples
    expected = die.probabilities()
    counts = np.bincount(weighted_samples(die, derive_stream(cfg.seed, SAMPLER_STREAM, 0), n), minlength=die.n)
    statistic, p_value = chi2_goodness_of_fit(counts, expected)

    scaled = die.scaled(cfg.sampling.scale_factor)
    scaled_counts = np.bincount(
        weighted_samples(scaled, derive_stream(cfg.seed, SAMPLER_STREAM, 1), n), minlength=die.n
    )
    _, p_two_sample = chi2_two_sample(counts, scaled_counts)
    identical = bool(np.array_equal(expected, scaled.probabilities()))

    rows = [(k, int(c), float(p)) for k, (c, p) in enumerate(zip(counts, expected))]
    payload = {
        "rates": list(die.rates),
        "currents_uA": list(die.currents) if die.currents else None,
        "n_samples": n,
        "chi_squared": statistic,
        "p_value": p_value,
        "scale_factor": cfg.sampling.scale_factor,
        "scaled_probabilities_identical": identical,
        "scaled_two_sample_p_value": p_two_sample,
    }
    outputs = [
        write_table(out_dir / "frequencies.csv", ("index", "count", "expected_p"), rows, fmt),
        write_json(out_dir / "fit.json", payload),
    ]
    return outputs, {"p_value": p_value, "scaled_two_sample_p_value": p_two_sample}


def ising_problem(cfg: ExperimentConfig) -> IsingProblem:
    """Explicit J/h when given, otherwise the selected built-in generator."""
    section = cfg.ising
    if section.couplings is not None:
        fields = section.fields if section.fields is not None else [0.0] * len(section.couplings)
        return IsingProblem(couplings=section.couplings, fields=fields, beta=section.beta, w=section.w)
    if section.generator == "random":
        seed = section.coupling_seed if section.coupling_seed is not None else cfg.seed
        return random_couplings(section.n_spins, seed, section.beta, section.scale, section.field_scale, section.w)
    return ferromagnetic_grid(section.rows, section.cols, section.coupling, section.field, section.beta, section.w)


@timed_operation("mh-ising")
def run_mh_ising(cfg: ExperimentConfig, out_dir: Path, fmt: str = "csv") -> RunnerResult:
    """Temporal Metropolis-Hastings chain compared with exact enumeration."""
    problem = ising_problem(cfg)
    section = cfg.ising
    rng = derive_stream(cfg.seed, CHAIN_STREAM)
    initial = rng.random(problem.n_spins) < 0.5
    chain = ising_mh_chain(problem, initial, section.burn_in + section.n_steps, rng)
    empirical = chain_distribution(chain, section.burn_in)
    exact = enumerate_boltzmann(problem)
    distance = total_variation(empirical, exact)
    flips = int(np.count_nonzero(np.any(chain[1:] != chain[:-1], axis=1)))

    stats = {
        "n_spins": problem.n_spins,
        "beta": problem.beta,
        "n_steps": section.n_steps,
        "burn_in": section.burn_in,
        "acceptance_rate": flips / max(1, chain.shape[0] - 1),
        "total_variation": distance,
    }
    rows = [(k, float(p), float(q)) for k, (p, q) in enumerate(zip(empirical, exact))]
    outputs = [
        write_table(out_dir / "distribution.csv", ("state_index", "empirical_p", "boltzmann_p"), rows, fmt),
        write_json(out_dir / "chain_stats.json", stats),
    ]
    logger.info(f"ISING_CHAIN | spins={problem.n_spins} | steps={section.n_steps} | tv={distance:.4f}")
    return outputs, {"total_variation": distance}


@timed_operation("drift")
def run_drift(cfg: ExperimentConfig, out_dir: Path, fmt: str = "csv") -> RunnerResult:
    """Long telegraph run binned into windows of mean AP dwell."""
    section = cfg.drift_run
    current = section.current_uA
    cycle = mean_dwell(current, cfg.device, MagState.P) + mean_dwell(current, cfg.device, MagState.AP)
    duration = section.n_bins * section.events_per_bin * cycle
    trace = generate_telegraph(cfg.device, current, duration, cfg.drift, derive_stream(cfg.seed, DRIFT_STREAM))
    report = drift_analysis(trace, section.n_bins)

    rows = [(k, m, s) for k, (m, s) in enumerate(zip(report.bin_means, report.bin_stderrs))]
    outputs = [
        write_table(out_dir / "drift.csv", ("bin_index", "mean_s", "stderr_s"), rows, fmt),
        write_json(out_dir / "drift.json", report),
    ]
    logger.info(
        f"DRIFT_ANALYSIS | bins={report.n_bins} | spread_s={report.spread_of_means:.3e} | "
        f"stderr_s={report.mean_of_standard_errors:.3e} | ratio={report.ratio:.2f}"
    )
    return outputs, {"ratio": report.ratio, "drift_enabled": cfg.drift.enabled}


RUNNERS: Dict[str, Callable[[ExperimentConfig, Path, str], RunnerResult]] = {
    "pdc-histogram": run_pdc_histogram,
    "cdf": run_cdf,
    "mean-vs-current": run_mean_vs_current,
    "weighted-sample": run_weighted_sample,
    "mh-ising": run_mh_ising,
    "drift": run_drift,
}
