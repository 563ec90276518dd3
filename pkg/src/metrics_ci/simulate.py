"""Monte Carlo checks of the normal-approximation interval.

Classifiers are replaced by binomial draws: a holdout set of ``n_holdout``
samples scored by a model of true accuracy ``p`` yields ``Binomial(n, p)``
correct predictions.  Seed effects are a Gaussian offset of ``p`` shared by all
folds trained with the same seed.

Every random draw is element ``i`` of a SplitMix64 stream keyed by
``(rng_seed, purpose)``, where ``i`` is the trial index (coverage) or the
(seed, fold) cell (multi-seed).  Results are therefore bit-identical for any
number of worker threads.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

from .data import AccuracyMeasurement, format_number, write_csv, csv_reader, csv_rows, parse_int
from .errors import DomainError
from .rng import derive_key, stream_uniform
from .stats import accuracy_ci, level_from_z, normal_approx_ci, normal_quantile, sample_stats

STREAM_COVERAGE = 1
STREAM_SEED_OFFSET = 2
STREAM_BINOMIAL = 3

CHUNK = 1 << 14
CLAMP_EPS = 1e-9
ENSEMBLE_COLUMNS = ("model", "fold", "seed", "correct", "total", "accuracy")
SIM_MODEL = "sim"


@dataclass(frozen=True)
class SimulationConfig:
    p: float
    n_holdout: int
    folds: int = 20
    seeds: int = 1
    tau: float = 0.0
    trials: int = 1
    rng_seed: int = 0

    def validate(self):
        if not (isinstance(self.p, (int, float)) and 0.0 < self.p < 1.0):
            raise DomainError(f"true accuracy p must lie in (0, 1), got {self.p!r}")
        for name in ("n_holdout", "folds", "seeds", "trials"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise DomainError(f"tau must be a finite nonnegative number, got {self.tau!r}")
        if isinstance(self.rng_seed, bool) or not isinstance(self.rng_seed, int) or self.rng_seed < 0:
            raise DomainError(f"rng_seed must be a nonnegative integer, got {self.rng_seed!r}")
        return self


@dataclass(frozen=True)
class CoverageResult:
    config: SimulationConfig
    z: float
    covered: int
    trials: int
    coverage: float
    nominal: float
    clamp_events: int = 0


@dataclass(frozen=True)
class UncertaintyComparison:
    approx_half_width: float
    sample_std: float
    ratio: Optional[float]  # None when approx_half_width == 0
    clamp_events: int = 0


@lru_cache(maxsize=64)
def _binomial_cdf(n: int, p: float) -> np.ndarray:
    return sps.binom.cdf(np.arange(n + 1), n, p)


def binomial_from_uniform(u, n: int, p: float) -> np.ndarray:
    """Inverse-CDF binomial draws: smallest k with P(X <= k) > u."""
    k = np.searchsorted(_binomial_cdf(n, p), u, side="right")
    return np.minimum(k, n)


def _coverage_table(n: int, p: float, z: float) -> np.ndarray:
    # covered[k] says whether the interval built from k correct answers holds p
    return np.array([normal_approx_ci(k, n, z).contains(p) for k in range(n + 1)])


def simulate_coverage(config: SimulationConfig, z: float, workers: int = 1) -> CoverageResult:
    """Fraction of trials whose interval contains the true accuracy.

    ``folds`` and ``seeds`` are ignored: each trial is a single holdout
    measurement.  Trial ``i`` always uses stream element ``i``, so the same
    ``rng_seed`` gives common random numbers across ``z``, ``p`` and ``n``.
    """
    config.validate()
    if not (math.isfinite(z) and z > 0):
        raise DomainError(f"z must be positive, got {z!r}")
    if workers < 1:
        raise DomainError("workers must be at least 1")
    n, p = config.n_holdout, float(config.p)
    table = _coverage_table(n, p, z)
    key = derive_key(config.rng_seed, STREAM_COVERAGE)

    def run(start):
        stop = min(start + CHUNK, config.trials)
        u = stream_uniform(key, np.arange(start, stop, dtype=np.uint64))
        return int(table[binomial_from_uniform(u, n, p)].sum())

    starts = range(0, config.trials, CHUNK)
    if workers == 1:
        covered = sum(map(run, starts))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            covered = sum(pool.map(run, starts))
    return CoverageResult(
        config=config,
        z=float(z),
        covered=covered,
        trials=config.trials,
        coverage=covered / config.trials,
        nominal=level_from_z(z),
    )


def seed_accuracies(config: SimulationConfig):
    """Per-seed true accuracies p + N(0, tau), clamped; returns (values, clamp count)."""
    if config.tau == 0:
        return [float(config.p)] * config.seeds, 0
    u = stream_uniform(derive_key(config.rng_seed, STREAM_SEED_OFFSET), np.arange(config.seeds))
    out, clamps = [], 0
    for ui in u:
        ps = config.p + config.tau * normal_quantile(float(ui))
        if not CLAMP_EPS <= ps <= 1.0 - CLAMP_EPS:
            clamps += 1
            ps = min(max(ps, CLAMP_EPS), 1.0 - CLAMP_EPS)
        out.append(ps)
    return out, clamps


def simulate_multiseed(config: SimulationConfig):
    """Simulate a folds x seeds grid of accuracies and compare two uncertainty estimates.

    Returns the measurements, sorted by (fold, seed), and an
    :class:`UncertaintyComparison` between the normal-approximation half-width
    at the pooled accuracy (z = 1, n = n_holdout) and the sample standard
    deviation of all measured accuracies.
    """
    config.validate()
    if config.folds < 2:
        raise DomainError("multi-seed simulation needs folds >= 2")
    n, folds = config.n_holdout, config.folds
    probs, clamps = seed_accuracies(config)
    key = derive_key(config.rng_seed, STREAM_BINOMIAL)
    correct = np.empty((folds, config.seeds), dtype=np.int64)
    for s, ps in enumerate(probs):
        u = stream_uniform(key, np.arange(s * folds, (s + 1) * folds, dtype=np.uint64))
        correct[:, s] = binomial_from_uniform(u, n, ps)

    measurements = [
        AccuracyMeasurement(
            group={"model": SIM_MODEL, "fold": f, "seed": s},
            correct=int(correct[f, s]),
            total=n,
        )
        for f in range(folds)
        for s in range(config.seeds)
    ]
    pooled = int(correct.sum()) / (n * correct.size)
    approx = accuracy_ci(pooled, n, 1.0).half_width
    std = sample_stats([m.accuracy for m in measurements]).std
    comparison = UncertaintyComparison(
        approx_half_width=approx,
        sample_std=std,
        ratio=std / approx if approx > 0 else None,
        clamp_events=clamps,
    )
    return measurements, comparison


def emit_ensemble(measurements: Sequence[AccuracyMeasurement]) -> bytes:
    if not measurements:
        raise DomainError("no measurements to emit")
    rows = sorted(measurements, key=lambda m: (m.group.get("fold", 0), m.group.get("seed", 0)))
    return write_csv(
        ENSEMBLE_COLUMNS,
        (
            (
                m.group.get("model", SIM_MODEL),
                m.group.get("fold", 0),
                m.group.get("seed", 0),
                m.correct,
                m.total,
                format_number(m.accuracy),
            )
            for m in rows
        ),
    )


def parse_ensemble(source) -> list[AccuracyMeasurement]:
    """Read an ensemble CSV back; accuracy is recomputed from the counts."""
    reader = csv_reader(source, ENSEMBLE_COLUMNS)
    out = []
    for line, (model, fold, seed, correct, total, _acc) in csv_rows(reader, 6):
        c = parse_int(correct, "correct", line)
        t = parse_int(total, "total", line, 1)
        if c > t:
            raise DomainError(f"line {line}: correct ({c}) exceeds total ({t})")
        out.append(
            AccuracyMeasurement(
                group={
                    "model": model,
                    "fold": parse_int(fold, "fold", line),
                    "seed": parse_int(seed, "seed", line),
                },
                correct=c,
                total=t,
            )
        )
    return out


def _num(x):
    if x is None:
        return None
    return float(format_number(x))


def _config_json(config: SimulationConfig) -> dict:
    d = asdict(config)
    d["p"] = _num(d["p"])
    d["tau"] = _num(d["tau"])
    return d


def coverage_json(result: CoverageResult) -> bytes:
    doc = {
        "config": _config_json(result.config),
        "z": _num(result.z),
        "coverage": _num(result.coverage),
        "nominal": _num(result.nominal),
        "clamp_events": result.clamp_events,
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def multiseed_json(config: SimulationConfig, comparison: UncertaintyComparison) -> bytes:
    doc = {
        "config": _config_json(config),
        "approx_half_width": _num(comparison.approx_half_width),
        "sample_std": _num(comparison.sample_std),
        "ratio": _num(comparison.ratio),
        "clamp_events": comparison.clamp_events,
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
