"""Fold-sample spread versus the normal-approximation half-width, one seed against several.

For each rng seed a folds x seeds grid of binomial accuracies is simulated and
the ratio sample_std / approx_half_width recorded.  With a single seed the
ratio scatters around one; a per-seed accuracy offset (tau) pushes it above.

    python3 scripts/multiseed_comparison.py --runs 100 --tau 0.01 --ensemble-dir out/
"""

import argparse
import statistics
from dataclasses import dataclass
from pathlib import Path

from metrics_ci.distribution import histogram_csv, normality_report, qq_csv
from metrics_ci.simulate import SimulationConfig, emit_ensemble, simulate_multiseed


@dataclass
class Scenario:
    name: str
    seeds: int
    tau: float


@dataclass
class StudyConfig:
    p: float = 0.9
    n_holdout: int = 670
    folds: int = 20
    runs: int = 100
    tau: float = 0.01
    seeds: int = 6
    bins: int = 25


def study(cfg: StudyConfig, scenario: Scenario):
    ratios, qq_devs = [], []
    for rng_seed in range(cfg.runs):
        sim = SimulationConfig(
            p=cfg.p, n_holdout=cfg.n_holdout, folds=cfg.folds,
            seeds=scenario.seeds, tau=scenario.tau, rng_seed=rng_seed,
        )
        ms, cmp = simulate_multiseed(sim)
        ratios.append(cmp.ratio)
        qq_devs.append(normality_report([m.accuracy for m in ms], cfg.bins)[1].max_abs_deviation)
    return ratios, qq_devs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=StudyConfig.runs)
    ap.add_argument("--tau", type=float, default=StudyConfig.tau)
    ap.add_argument("--seeds", type=int, default=StudyConfig.seeds)
    ap.add_argument("--ensemble-dir", help="write one example ensemble, histogram and QQ per scenario")
    args = ap.parse_args()
    cfg = StudyConfig(runs=args.runs, tau=args.tau, seeds=args.seeds)

    scenarios = [
        Scenario("single seed", 1, 0.0),
        Scenario(f"{cfg.seeds} seeds, tau=0", cfg.seeds, 0.0),
        Scenario(f"{cfg.seeds} seeds, tau={cfg.tau}", cfg.seeds, cfg.tau),
    ]
    print(f"{'scenario':<24} {'median ratio':>12} {'ratio>1':>8} {'median QQ dev':>14}")
    for sc in scenarios:
        ratios, devs = study(cfg, sc)
        above = sum(r > 1 for r in ratios)
        print(f"{sc.name:<24} {statistics.median(ratios):>12.3f} {above:>5}/{cfg.runs:<3}"
              f"{statistics.median(devs):>14.5f}")

        if args.ensemble_dir:
            out = Path(args.ensemble_dir)
            out.mkdir(parents=True, exist_ok=True)
            stem = sc.name.replace(" ", "_").replace(",", "").replace("=", "")
            ms, _ = simulate_multiseed(SimulationConfig(
                p=cfg.p, n_holdout=cfg.n_holdout, folds=cfg.folds, seeds=sc.seeds, tau=sc.tau))
            hist, qq = normality_report([m.accuracy for m in ms], cfg.bins)
            (out / f"{stem}_ensemble.csv").write_bytes(emit_ensemble(ms))
            (out / f"{stem}_hist.csv").write_bytes(histogram_csv(hist))
            (out / f"{stem}_qq.csv").write_bytes(qq_csv(qq))


if __name__ == "__main__":
    main()
