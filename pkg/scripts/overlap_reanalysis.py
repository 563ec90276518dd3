"""Attach one- and two-sigma intervals to published accuracy estimates and list overlaps.

    python3 scripts/overlap_reanalysis.py docs/estimates_template.csv --svg chart.svg
"""

import argparse
from pathlib import Path

from metrics_ci.data import parse_estimates
from metrics_ci.report import (
    augment_estimates,
    augmented_csv,
    chart_from_augmented,
    overlap_matrix,
    render_error_bar_svg,
)
from metrics_ci.stats import z_from_level


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("estimates")
    ap.add_argument("--baseline", help="group to compare against (default: first row)")
    ap.add_argument("--level", type=float, default=0.95, help="second interval level")
    ap.add_argument("--csv", help="write the augmented CSV here")
    ap.add_argument("--svg", help="write the error-bar chart here")
    args = ap.parse_args()

    estimates = parse_estimates(Path(args.estimates).read_bytes())
    zs = [1.0, z_from_level(args.level)]
    rows = augment_estimates(estimates, zs)
    labels = [e.group for e in estimates]
    base = labels.index(args.baseline) if args.baseline else 0

    for j, z in enumerate(zs):
        matrix = overlap_matrix([cis[j] for _, cis in rows])
        apart = [labels[i] for i, ok in enumerate(matrix[base]) if not ok]
        print(f"z = {z:.6g}: separated from {labels[base]}: {', '.join(apart) or 'none'}")

    if args.csv:
        Path(args.csv).write_bytes(augmented_csv(rows))
    if args.svg:
        spec = chart_from_augmented(rows, title=f"accuracy, one sigma and {100 * args.level:g}%")
        Path(args.svg).write_bytes(render_error_bar_svg(spec))


if __name__ == "__main__":
    main()
