"""``metrics-ci`` command line.

Exit codes: 0 success, 1 data or domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import data, distribution, report, simulate
from .errors import InsufficientDataError, MetricsCIError, UsageError
from .stats import accuracy_ci, normal_approx_ci, z_from_level


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, payload: bytes):
    if path is None or path == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(payload)


def _z(args, default=None):
    if getattr(args, "level", None) is not None:
        return z_from_level(args.level)
    if args.z is not None:
        return args.z
    return default


def _add_z_or_level(p, required: bool, help_default=""):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--z", type=float, help=f"critical value{help_default}")
    g.add_argument("--level", type=float, help="two-sided confidence level in (0, 1)")


def cmd_ci(args):
    z = _z(args)
    if args.acc is not None:
        ci = accuracy_ci(args.acc, args.n, z)
    else:
        ci = normal_approx_ci(args.correct, args.n, z)
    _write(args.output, report.ci_json(ci))
    print(report.ci_line(ci), file=sys.stderr)


def cmd_compare(args):
    records = data.parse_predictions(_read(args.input))
    rep = report.build_comparison(
        records, group_by=args.group_by, z=_z(args, 1.0), with_mcnemar=args.mcnemar
    )
    _write(args.output, report.comparison_json(rep))


def cmd_augment(args):
    if args.level is not None:
        zs = [z_from_level(level) for level in args.level]
    else:
        zs = args.z if args.z is not None else [1.0]
    if not 1 <= len(zs) <= 2:
        raise UsageError(f"give one or two z values, got {len(zs)}")
    estimates = data.parse_estimates(_read(args.input))
    if not estimates:
        raise InsufficientDataError("estimates file has no rows")
    rows = report.augment_estimates(estimates, zs)
    _write(args.output, report.augmented_csv(rows))
    if args.svg:
        spec = report.chart_from_augmented(rows, title=args.title)
        with open(args.svg, "wb") as fh:
            fh.write(report.render_error_bar_svg(spec))


def cmd_folds(args):
    labels = data.parse_labels(_read(args.input))
    assignment = data.stratified_folds(labels, args.k, args.seed)
    for w in assignment.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _write(args.output, data.folds_csv(assignment))


def cmd_dist(args):
    values = data.read_accuracy_column(_read(args.input))
    hist = distribution.histogram(values, args.bins)
    if args.qq or args.qq_output:
        qq = distribution.qq_gaussian(values)
        if args.qq_output:
            _write(args.qq_output, distribution.qq_csv(qq))
        print(
            f"qq: n={len(values)} mu={data.format_number(qq.mu)} "
            f"sigma={data.format_number(qq.sigma)} "
            f"max_abs_deviation={data.format_number(qq.max_abs_deviation)}",
            file=sys.stderr,
        )
    _write(args.output, distribution.histogram_csv(hist))


def cmd_simulate(args):
    config = simulate.SimulationConfig(
        p=args.p,
        n_holdout=args.n,
        folds=args.folds,
        seeds=args.seeds,
        tau=args.tau,
        trials=args.trials,
        rng_seed=args.seed,
    )
    if args.mode == "coverage":
        result = simulate.simulate_coverage(config, _z(args, 1.0), workers=args.workers)
        _write(args.output, simulate.coverage_json(result))
    else:
        if args.z is not None or args.level is not None:
            raise UsageError("--z/--level apply to coverage only; multiseed uses z = 1")
        measurements, comparison = simulate.simulate_multiseed(config)
        if args.ensemble:
            _write(args.ensemble, simulate.emit_ensemble(measurements))
        _write(args.output, simulate.multiseed_json(config, comparison))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metrics-ci",
        description="Uncertainty on classifier accuracy: intervals, comparisons, simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ci", help="normal-approximation interval for one accuracy")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--acc", type=float, help="accuracy in [0, 1]")
    g.add_argument("--correct", type=int, help="number of correct predictions")
    p.add_argument("--n", type=int, required=True, help="holdout size")
    _add_z_or_level(p, required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("compare", help="per-group intervals, overlap matrix, McNemar")
    p.add_argument("--input", required=True, help="predictions.csv")
    p.add_argument("--group-by", default="model", choices=sorted(data.GROUP_KEYS))
    _add_z_or_level(p, required=False, help_default=" (default 1)")
    p.add_argument("--mcnemar", action="store_true", help="pairwise McNemar tests between models")
    p.add_argument("--output")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("augment", help="add intervals to an estimates.csv")
    p.add_argument("--input", required=True, help="estimates.csv")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--z", type=float, nargs="+", help="one or two critical values (default 1)")
    g.add_argument("--level", type=float, nargs="+", help="one or two confidence levels")
    p.add_argument("--output")
    p.add_argument("--svg", help="also write an error-bar chart here")
    p.add_argument("--title", default="", help="chart title")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("folds", help="stratified k-fold assignment")
    p.add_argument("--input", required=True, help="labels.csv with sample_id,label")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_folds)

    p = sub.add_parser("dist", help="histogram and Gaussian QQ of an accuracy ensemble")
    p.add_argument("--input", required=True, help="CSV with an accuracy column")
    p.add_argument("--bins", type=int, required=True)
    p.add_argument("--qq", action="store_true", help="print the QQ deviation summary")
    p.add_argument("--qq-output", help="write QQ points (theoretical,sample) here")
    p.add_argument("--output")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("simulate", help="Monte Carlo coverage or multi-seed comparison")
    p.add_argument("mode", choices=("coverage", "multiseed"))
    p.add_argument("--p", type=float, required=True, help="true accuracy")
    p.add_argument("--n", type=int, required=True, help="holdout size per measurement")
    _add_z_or_level(p, required=False, help_default=" (coverage only, default 1)")
    p.add_argument("--tau", type=float, default=0.0, help="std of per-seed accuracy offsets")
    p.add_argument("--folds", type=int, default=20)
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0, help="rng seed")
    p.add_argument("--workers", type=int, default=1, help="threads (results do not depend on it)")
    p.add_argument("--ensemble", help="multiseed: write the measurement ensemble CSV here")
    p.add_argument("--output")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"metrics-ci: usage error: {exc}", file=sys.stderr)
        return 2
    except (MetricsCIError, OSError) as exc:
        print(f"metrics-ci: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
