"""Empirical coverage of the normal-approximation interval over a (p, n, z) grid.

    python3 scripts/coverage_grid.py --trials 100000 --output coverage.csv
"""

import argparse
import itertools
import time
from dataclasses import dataclass, field

from metrics_ci.data import format_number, write_csv
from metrics_ci.simulate import SimulationConfig, simulate_coverage


@dataclass
class GridConfig:
    ps: tuple = (0.5, 0.7, 0.9)
    ns: tuple = (670, 3925)
    zs: tuple = (1.0, 1.96)
    trials: int = 100_000
    base_seed: int = 100
    workers: int = 1
    tolerance: float = 0.02
    output: str = field(default="")


def run(cfg: GridConfig):
    rows = []
    for i, (p, n, z) in enumerate(itertools.product(cfg.ps, cfg.ns, cfg.zs)):
        sim = SimulationConfig(p=p, n_holdout=n, trials=cfg.trials, rng_seed=cfg.base_seed + i)
        r = simulate_coverage(sim, z, workers=cfg.workers)
        rows.append((p, n, z, r.coverage, r.nominal, r.coverage - r.nominal))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=GridConfig.trials)
    ap.add_argument("--base-seed", type=int, default=GridConfig.base_seed)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--output", default="")
    args = ap.parse_args()
    cfg = GridConfig(trials=args.trials, base_seed=args.base_seed, workers=args.workers, output=args.output)

    t0 = time.perf_counter()
    rows = run(cfg)
    elapsed = time.perf_counter() - t0

    print(f"{'p':>5} {'n':>6} {'z':>5} {'coverage':>9} {'nominal':>9} {'diff':>8}")
    for p, n, z, cov, nom, diff in rows:
        flag = "" if abs(diff) <= cfg.tolerance else "  <-- outside tolerance"
        print(f"{p:>5} {n:>6} {z:>5} {cov:>9.4f} {nom:>9.4f} {diff:>+8.4f}{flag}")
    worst = max(rows, key=lambda r: abs(r[5]))
    print(f"worst cell p={worst[0]} n={worst[1]} z={worst[2]}: {worst[5]:+.4f}; {elapsed:.1f} s")

    if cfg.output:
        header = ("p", "n", "z", "coverage", "nominal", "difference")
        body = [(format_number(p), n, format_number(z), *(format_number(v) for v in rest))
                for p, n, z, *rest in rows]
        with open(cfg.output, "wb") as fh:
            fh.write(write_csv(header, body))


if __name__ == "__main__":
    main()
