"""Acceptance criteria.  Each test carries an ``acceptance`` marker; the
terminal summary prints one PASS/FAIL line per criterion."""

import json
import statistics
import subprocess
import sys
import time
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from metrics_ci.data import parse_estimates, stratified_folds
from metrics_ci.distribution import plotting_positions, qq_gaussian
from metrics_ci.simulate import CHUNK, SimulationConfig, simulate_coverage, simulate_multiseed
from metrics_ci.stats import (
    accuracy_ci,
    intervals_overlap,
    level_from_z,
    mcnemar,
    normal_approx_ci,
    normal_quantile,
    z_from_level,
)

from oracles import binomial_half_tail_bruteforce, wald_half_width

FIXTURES = Path(__file__).parent / "fixtures"
acceptance = pytest.mark.acceptance


@acceptance("AC1", "interval half-width matches 50-digit evaluation within 1e-12 relative, < 1 s")
def test_ac1_interval_exactness():
    rng = np.random.default_rng(20220601)
    ns = rng.integers(1, 10**6, size=1000, endpoint=True)
    triples = [(int(rng.integers(0, n, endpoint=True)), int(n), float(rng.uniform(0.1, 5.0))) for n in ns]
    # make sure the boundary counts are represented
    triples[:4] = [(0, 10, 1.0), (10, 10, 1.96), (1, 1, 3.0), (1, 2, 0.5)]
    start = time.perf_counter()
    cis = [normal_approx_ci(k, n, z) for k, n, z in triples]
    elapsed = time.perf_counter() - start
    for (k, n, z), ci in zip(triples, cis):
        ref = wald_half_width(k, n, z)
        if ref == 0:
            assert ci.half_width == 0
        else:
            assert abs((ci.half_width - ref) / ref) < 1e-12
        acc = mp.mpf(k) / n
        assert abs(ci.lower - max(0, acc - ref)) <= 1e-12 * max(ci.lower, 1e-300) + 1e-16
        assert abs(ci.upper - min(1, acc + ref)) <= 1e-12 * ci.upper + 1e-16
    assert elapsed < 1.0


@acceptance("AC2", "z(0.95) = 1.959964 and level(z=1) = 0.6826895, < 1 s")
def test_ac2_level_round_trip():
    start = time.perf_counter()
    z95 = z_from_level(0.95)
    l1 = level_from_z(1.0)
    assert abs(z95 - 1.959964) <= 5e-6
    assert abs(l1 - 0.6826895) <= 1e-6
    assert abs(z_from_level(l1) - 1.0) < 1e-12
    assert time.perf_counter() - start < 1.0


COVERAGE_GRID = [(p, n, z) for p in (0.5, 0.7, 0.9) for n in (670, 3925) for z in (1.0, 1.96)]


@acceptance("AC3", "coverage within 0.02 of nominal on the 12-cell grid, 1e5 trials, < 30 s")
def test_ac3_coverage_grid():
    start = time.perf_counter()
    results = [
        simulate_coverage(SimulationConfig(p=p, n_holdout=n, trials=100_000, rng_seed=100 + i), z)
        for i, (p, n, z) in enumerate(COVERAGE_GRID)
    ]
    elapsed = time.perf_counter() - start
    off = {(r.config.p, r.config.n_holdout, r.z): r.coverage - r.nominal for r in results}
    assert all(abs(d) <= 0.02 for d in off.values()), off
    assert elapsed < 30


@acceptance("AC4", "single seed: median sample_std/approx ratio in [0.85, 1.15] over 100 seeds, < 10 s")
def test_ac4_single_seed_agreement():
    start = time.perf_counter()
    ratios = [
        simulate_multiseed(
            SimulationConfig(p=0.9, n_holdout=670, folds=20, seeds=1, tau=0.0, rng_seed=s)
        )[1].ratio
        for s in range(100)
    ]
    elapsed = time.perf_counter() - start
    assert 0.85 <= statistics.median(ratios) <= 1.15
    assert elapsed < 10


@acceptance("AC5", "six seeds with tau=0.01: ratio > 1 in at least 95 of 100 seeds, < 10 s")
def test_ac5_multiseed_underestimation():
    start = time.perf_counter()
    above = sum(
        simulate_multiseed(
            SimulationConfig(p=0.9, n_holdout=670, folds=20, seeds=6, tau=0.01, rng_seed=s)
        )[1].ratio
        > 1
        for s in range(100)
    )
    elapsed = time.perf_counter() - start
    assert above >= 95
    assert elapsed < 10


@acceptance("AC6", "13394 balanced samples, k=20: fold sizes in {669, 670}, class counts in {66, 67}")
def test_ac6_stratification():
    labels = [(f"img{i:05d}", f"class{i % 10}") for i in range(13394)]
    for seed in (0, 42, 2022):
        fa = stratified_folds(labels, 20, seed)
        assert len(fa.fold_sizes()) == 20
        assert set(fa.fold_sizes()) <= {669, 670}
        assert sum(fa.fold_sizes()) == 13394
        for counts in fa.class_fold_counts().values():
            assert set(counts) <= {66, 67}


@acceptance("AC7", "McNemar b=15, c=5 exact values; chi-square vs exact within 0.02 for b+c in [25, 200]")
def test_ac7_mcnemar():
    res = mcnemar(15, 5)
    assert res.statistic == 4.05
    oracle = 2 * binomial_half_tail_bruteforce(5, 20) / 2**20
    assert abs(res.p_exact - oracle) < 1e-15
    assert abs(res.p_exact - 0.0413895) <= 1e-6
    worst = max(
        abs(r.p_chi2 - r.p_exact)
        for m in range(25, 201)
        for b in range(m + 1)
        for r in [mcnemar(b, m - b)]
    )
    assert worst <= 0.02


AC8_ESTIMATES = [("msa0", 0.800, 2000), ("msa1", 0.810, 2000), ("msa2", 0.825, 2000), ("msa3", 0.790, 2000)]


def _cli(*argv, cwd=None):
    proc = subprocess.run(
        [sys.executable, "-m", "metrics_ci", *map(str, argv)], capture_output=True, cwd=cwd, check=False
    )
    return proc


def _overlap_from_augmented(text, col):
    rows = [line.split(",") for line in text.splitlines()[1:]]
    cis = [(float(r[4 + 3 * col]), float(r[5 + 3 * col])) for r in rows]
    return [[max(a[0], b[0]) <= min(a[1], b[1]) for b in cis] for a in cis]


@acceptance("AC8", "overlap with the baseline at z=1.96 for all groups, one group separated at z=1")
def test_ac8_overlap_pattern(tmp_path):
    est = tmp_path / "estimates.csv"
    est.write_text("group,accuracy,n\n" + "".join(f"{g},{a},{n}\n" for g, a, n in AC8_ESTIMATES))
    preds = tmp_path / "predictions.csv"
    lines = ["model,fold,seed,sample_id,label,prediction"]
    for g, a, n in AC8_ESTIMATES:
        k = round(a * n)
        lines += [f"{g},0,0,s{i:04d},y,{'y' if i < k else 'n'}" for i in range(n)]
    preds.write_text("\n".join(lines) + "\n")

    proc = _cli("augment", "--input", est, "--z", 1, 1.96)
    assert proc.returncode == 0, proc.stderr
    aug = proc.stdout.decode()
    at_1 = _overlap_from_augmented(aug, 0)
    at_196 = _overlap_from_augmented(aug, 1)
    # baseline row: msa2 is the only group separated at one sigma
    assert at_1[0] == [True, True, False, True]
    assert at_196[0] == [True, True, True, True]

    for z, expected in ((1, at_1), (1.96, at_196)):
        proc = _cli("compare", "--input", preds, "--z", z)
        assert proc.returncode == 0, proc.stderr
        doc = json.loads(proc.stdout)
        assert [g["label"] for g in doc["groups"]] == ["msa0", "msa1", "msa2", "msa3"]
        assert doc["overlap"] == expected

    # the same pattern straight from the library
    parsed = parse_estimates(est.read_bytes())
    for z, expected in ((1.0, at_1), (1.96, at_196)):
        cis = [accuracy_ci(e.accuracy, e.n, z) for e in parsed]
        assert [[intervals_overlap(a, b) for b in cis] for a in cis] == expected


def _run_outputs(workdir, argv, files):
    """Run once in ``workdir``; return stdout, stderr and the bytes of each output file."""
    workdir.mkdir()
    args = list(argv)
    for flag, name in files.items():
        args += [flag, name]
    proc = _cli(*args, cwd=workdir)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout, proc.stderr, {name: (workdir / name).read_bytes() for name in files.values()}


@acceptance("AC9", "every subcommand is byte-identical across runs, simulate across thread counts")
def test_ac9_determinism(tmp_path):
    est = tmp_path / "estimates.csv"
    est.write_text("group,accuracy,n\nmsa0,0.8,2000\nmsa1,0.81,2000\n")
    ensemble = tmp_path / "ensemble.csv"
    proc = _cli("simulate", "multiseed", "--p", 0.9, "--n", 670, "--seeds", 6, "--tau", 0.01,
                "--ensemble", ensemble)
    assert proc.returncode == 0, proc.stderr
    cases = [
        (["ci", "--acc", 0.9, "--n", 3925, "--level", 0.95], {"--output": "ci.json"}),
        (["compare", "--input", FIXTURES / "pair_8.csv", "--mcnemar"], {"--output": "cmp.json"}),
        (["augment", "--input", est, "--z", 1, 1.96], {"--output": "aug.csv", "--svg": "aug.svg"}),
        (["folds", "--input", FIXTURES / "labels_30.csv", "--k", 4, "--seed", 7], {"--output": "f.csv"}),
        (["dist", "--input", ensemble, "--bins", 25, "--qq"], {"--output": "h.csv", "--qq-output": "qq.csv"}),
        (["simulate", "multiseed", "--p", 0.9, "--n", 670, "--seeds", 6, "--tau", 0.01, "--seed", 3],
         {"--ensemble": "ens.csv"}),
    ]
    for i, (argv, files) in enumerate(cases):
        first = _run_outputs(tmp_path / f"run{i}a", argv, files)
        second = _run_outputs(tmp_path / f"run{i}b", argv, files)
        assert first == second, argv[0]
        assert all(first[2].values())

    # several chunks, so threads really do interleave
    trials = 3 * CHUNK + 123
    cov = ["simulate", "coverage", "--p", 0.7, "--n", 670, "--z", 1.96, "--trials", trials, "--seed", 9]
    runs = [_cli(*cov, "--workers", w).stdout for w in (1, 8, 8, 3)]
    assert len(set(runs)) == 1 and json.loads(runs[0])["config"]["trials"] == trials


@acceptance("AC10", "exact Gaussian quantiles are a QQ fixed point; affine equivariance in 100 cases")
def test_ac10_qq_fixed_point():
    for mu, sigma, n in ((0.9, 0.01, 3), (0.9, 0.01, 101), (0.5, 0.1, 120), (0.9, 0.005, 10_000), (-3.0, 7.0, 57)):
        values = [mu + sigma * normal_quantile(q) for q in plotting_positions(n)]
        assert qq_gaussian(values).max_abs_deviation < 1e-9

    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(3, 200))
        values = list(rng.normal(rng.uniform(0, 1), rng.uniform(0.001, 0.2), n))
        a, b = float(rng.uniform(0.01, 10)), float(rng.uniform(-5, 5))
        q = qq_gaussian(values)
        qa = qq_gaussian([a * v + b for v in values])
        for (t, s), (ta, sa) in zip(q.points, qa.points):
            assert abs(ta - (a * t + b)) < 1e-9
            assert abs(sa - (a * s + b)) < 1e-9
        assert abs(qa.max_abs_deviation - a * q.max_abs_deviation) < 1e-9
