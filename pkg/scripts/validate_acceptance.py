"""
Validation script for the full-size experiments.
Runs every experiment at its shipped size and checks the expected statistics and runtimes.
"""

import math
import os
import sys
import tempfile
import time
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from configs.config_loader import load_config
from core.device import DeviceParams, MagState, TelegraphTrace
from core.frontend import digitize, sr_latch, suppress_short_pulses
from core.timing import ClockConfig, min_detectable_dwell
from experiments.cli import EXIT_OK, cli_dispatch
from experiments.pipeline import run_pdc_batch
from experiments.runners import RUNNERS
from experiments.sweeps import sweep_mean_vs_current
from samplers.bernoulli import temporal_bernoulli
from samplers.metropolis import acceptance_probability, mh_accept
from stats.fitting import curve_rms_relative_error
from utils.logging_config import configure_logging
from utils.rng import SAMPLER_STREAM, derive_stream

RESULTS = []


def check(label: str, passed: bool, detail: str = "", started: float = None, budget: float = None):
    """Print one check and remember its outcome"""
    timing = ""
    if started is not None:
        elapsed = time.perf_counter() - started
        timing = f" | {elapsed:.1f}s"
        if budget is not None and elapsed > budget:
            timing += f" (budget {budget:.0f}s)"
    print(f"   {'[OK]' if passed else '[X]'} {label}: {detail}{timing}")
    RESULTS.append((label, passed))


def validate_exponentiality(out: Path):
    print("\n[OK] Exponential switching times")
    start = time.perf_counter()
    _, summary = RUNNERS["pdc-histogram"](load_config("default"), out / "hist")
    check("reduced chi2 < 2", summary["reduced_chi_squared"] < 2.0,
          f"{summary['reduced_chi_squared']:.2f}", start, 5)
    check("KS p > 0.01", summary["ks_p_value"] > 0.01, f"{summary['ks_p_value']:.3f}")


def validate_cdf(out: Path):
    print("\n[OK] CDF tunability")
    start = time.perf_counter()
    _, summary = RUNNERS["cdf"](load_config("default"), out / "cdf")
    lambdas = ", ".join(f"{lam:.1f}" for lam in summary["lambdas"])
    check("lambda increases with current", summary["lambda_increasing"], lambdas, start, 15)


def validate_sweep():
    print("\n[OK] Mean switching time versus current")
    cfg = load_config("sweep")
    start = time.perf_counter()
    still = sweep_mean_vs_current(cfg)
    true_log_tau = np.log([p.true_tau_s for p in still.points])
    span = max(p.true_tau_s for p in still.points) / min(p.true_tau_s for p in still.points)
    rms = curve_rms_relative_error(still.combined, cfg.sweep.currents_uA, true_log_tau)
    check("tau range spans two decades", span >= 100.0, f"{span:.0f}x")
    check("curve within 3% RMS", rms < 0.03, f"{rms:.2e}", start, 60)

    start = time.perf_counter()
    drifting = sweep_mean_vs_current(cfg.model_copy(update={"drift": cfg.drift.model_copy(update={"enabled": True})}))
    chi2 = drifting.combined.reduced_chi_squared
    check("drift raises reduced chi2 above 3", chi2 > 3.0,
          f"{chi2:.2f} vs {still.combined.reduced_chi_squared:.2f} without drift", start, 60)


def validate_offset():
    print("\n[OK] Systematic path offset")
    cfg = load_config("default")
    start = time.perf_counter()
    records = [r for r in run_pdc_batch(cfg, 10_000) if not r.overflowed]
    extra = np.mean([r.result.count - math.floor(r.true_time / cfg.timing.period) for r in records])
    check("mean extra count in [1, 2)", 1.0 <= extra < 2.0, f"{extra:.3f}", start, 5)


def validate_short_dwells():
    print("\n[OK] Short-dwell filtering")
    device = DeviceParams()
    cfg = load_config("default")
    clock = ClockConfig()
    limit = max(cfg.hysteresis.response_time, min_detectable_dwell(clock))
    rng = np.random.default_rng(5)
    violations = 0
    for _ in range(1000):
        n = int(rng.integers(1, 20))
        p_dwells = rng.uniform(1e-6, 1e-4, size=n + 1)
        ap_dwells = rng.uniform(1e-9, limit * 0.999, size=n)
        dwells = np.empty(2 * n + 1)
        dwells[0::2] = p_dwells
        dwells[1::2] = ap_dwells
        trace = TelegraphTrace(start_state=MagState.P, dwells=tuple(dwells), total=math.fsum(dwells))
        edges = suppress_short_pulses(digitize(trace, 918.0, device.r_p, device.r_ap, cfg.hysteresis), limit)
        violations += not sr_latch(edges).is_never
    check("no latch on sub-threshold dwells", violations == 0, f"{violations} violations in 1000 traces")


def validate_bernoulli():
    print("\n[OK] Temporal Bernoulli")
    start = time.perf_counter()
    n = 100_000
    for p in (0.1, 0.5, 0.9):
        rng = derive_stream(1, SAMPLER_STREAM, int(p * 10))
        rate = sum(temporal_bernoulli(p, 1e-3, rng) for _ in range(n)) / n
        sigma = math.sqrt(p * (1 - p) / n)
        check(f"p={p}", abs(rate - p) < 3 * sigma, f"{rate:.4f} (3 sigma = {3 * sigma:.4f})")
    check("runtime", True, "", start, 5)


def validate_metropolis():
    print("\n[OK] Metropolis-Hastings acceptance")
    n = 100_000
    for k, beta_de in enumerate((-1.0, 0.5, 1.0, 2.0)):
        rng = derive_stream(2, SAMPLER_STREAM, k)
        expected = acceptance_probability(beta_de, 1.0)
        rate = sum(mh_accept(beta_de, 1.0, 1.0, rng) for _ in range(n)) / n
        sigma = math.sqrt(expected * (1 - expected) / n)
        within = rate == 1.0 if sigma == 0 else abs(rate - expected) < 3 * sigma
        check(f"beta*dE={beta_de}", within, f"{rate:.4f} vs {expected:.4f}")
    exact = all(
        acceptance_probability(de, 0.7) / acceptance_probability(-de, 0.7) == math.exp(-0.7 * de)
        for de in (0.5, 1.0, 2.0, 3.5)
    )
    check("detailed-balance ratio", exact, "exact")


def validate_weighted(out: Path):
    print("\n[OK] Exponential clocks")
    start = time.perf_counter()
    _, summary = RUNNERS["weighted-sample"](load_config("weighted"), out / "weighted")
    check("goodness of fit p > 0.01", summary["p_value"] > 0.01, f"{summary['p_value']:.3f}")
    check("scaled rates indistinguishable", summary["scaled_two_sample_p_value"] > 0.01,
          f"{summary['scaled_two_sample_p_value']:.3f}", start, 10)


def validate_ising(out: Path):
    print("\n[OK] Ising chain")
    start = time.perf_counter()
    _, summary = RUNNERS["mh-ising"](load_config("ising_2x2"), out / "ising")
    check("total variation < 0.01", summary["total_variation"] < 0.01,
          f"{summary['total_variation']:.4f}", start, 30)


def validate_drift(out: Path):
    print("\n[OK] Drift detection")
    cfg = load_config("drift")
    still = cfg.model_copy(update={"drift": cfg.drift.model_copy(update={"enabled": False})})
    start = time.perf_counter()
    _, summary = RUNNERS["drift"](still, out / "drift_off")
    check("drift off ratio in [0.7, 1.5]", 0.7 <= summary["ratio"] <= 1.5, f"{summary['ratio']:.2f}", start, 60)

    start = time.perf_counter()
    ratios = []
    for k in range(5):
        _, summary = RUNNERS["drift"](cfg.model_copy(update={"seed": cfg.seed + k}), out / f"drift_on_{k}")
        ratios.append(summary["ratio"])
    mean = float(np.mean(ratios))
    check("drift on ratio in [2.1, 3.5]", 2.1 <= mean <= 3.5,
          f"{mean:.2f} over 5 seeds (shipped seed {ratios[0]:.2f})", start, 300)


def validate_reproducibility(out: Path):
    print("\n[OK] Reproducibility")
    first, replay = out / "repro_a", out / "repro_b"
    ok = cli_dispatch(["pdc-histogram", "--out", str(first)]) == EXIT_OK
    ok = ok and cli_dispatch(["pdc-histogram", "--config", str(first / "manifest.json"), "--out", str(replay)]) == EXIT_OK
    identical = ok and all(
        (first / name).read_bytes() == (replay / name).read_bytes() for name in ("histogram.csv", "trials.csv")
    )
    check("manifest replay is byte-identical", identical, "histogram.csv, trials.csv")


def main():
    """Run all validations"""
    print("\n[ACCEPT] SMTJ SIMULATOR ACCEPTANCE VALIDATION")
    print("=" * 60)
    configure_logging("WARNING")

    try:
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp)
            validate_exponentiality(out)
            validate_cdf(out)
            validate_sweep()
            validate_offset()
            validate_short_dwells()
            validate_bernoulli()
            validate_metropolis()
            validate_weighted(out)
            validate_ising(out)
            validate_drift(out)
            validate_reproducibility(out)
    except Exception as e:
        print(f"\n[X] VALIDATION FAILED: {e}")
        import traceback
        traceback.print_exc()
        return 1

    failed = [label for label, passed in RESULTS if not passed]
    print("\n" + "=" * 60)
    if failed:
        print(f"[X] {len(failed)} CHECKS FAILED: {', '.join(failed)}")
        return 1
    print(f"[SUCCESS] All {len(RESULTS)} checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
