"""Comparison tables, interval-augmented estimates and error-bar charts."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .data import (
    AccuracyMeasurement,
    Estimate,
    PredictionRecord,
    aggregate_accuracy,
    contingency,
    format_number,
    write_csv,
)
from .errors import DomainError, UsageError
from .stats import (
    ConfidenceInterval,
    McNemarResult,
    accuracy_ci,
    intervals_overlap,
    mcnemar,
    normal_approx_ci,
)

# augmented CSVs are re-read to rebuild intervals, so they carry more digits
AUGMENT_DIGITS = 10


@dataclass(frozen=True)
class GroupSummary:
    label: str
    measurement: AccuracyMeasurement
    one_sigma: ConfidenceInterval
    interval: ConfidenceInterval


@dataclass(frozen=True)
class ComparisonReport:
    groups: list  # GroupSummary, in group-key order
    overlap: list  # square bool matrix at the requested level
    mcnemar: Optional[list] = None  # ((label_a, label_b), McNemarResult)
    z: float = 1.0


@dataclass(frozen=True)
class ChartSpec:
    title: str
    series: list  # (label, point, first_half_width, second_half_width or None)
    y_range: tuple = (0.0, 1.0)

    def __post_init__(self):
        if not self.series:
            raise DomainError("chart needs at least one series")
        lo, hi = self.y_range
        if not 0.0 <= lo < hi <= 1.0:
            raise DomainError(f"y_range must satisfy 0 <= lo < hi <= 1, got {self.y_range}")


def overlap_matrix(intervals: Sequence[ConfidenceInterval]) -> list:
    return [[intervals_overlap(a, b) for b in intervals] for a in intervals]


def build_comparison(
    records: Sequence[PredictionRecord],
    group_by: str = "model",
    z: float = 1.0,
    with_mcnemar: bool = False,
) -> ComparisonReport:
    """Pooled-count intervals per group, their overlap, and optional pairwise McNemar tests.

    McNemar pairs two models over the samples they share within each
    (fold, seed) context, so it is only available when grouping by model.
    """
    measurements = aggregate_accuracy(records, [group_by])
    groups = [
        GroupSummary(
            label=m.label,
            measurement=m,
            one_sigma=normal_approx_ci(m.correct, m.total, 1.0),
            interval=normal_approx_ci(m.correct, m.total, z),
        )
        for m in measurements
    ]
    tests = None
    if with_mcnemar:
        if group_by != "model":
            raise UsageError("McNemar comparison requires grouping by model")
        if len(groups) < 2:
            raise UsageError("McNemar comparison needs at least two models")
        by_model = {}
        for r in records:
            by_model.setdefault(r.model_id, []).append(r)
        tests = []
        for i, ga in enumerate(groups):
            for gb in groups[i + 1 :]:
                table = contingency(by_model[ga.label], by_model[gb.label])
                tests.append(((ga.label, gb.label), mcnemar(table.b, table.c)))
    return ComparisonReport(
        groups=groups,
        overlap=overlap_matrix([g.interval for g in groups]),
        mcnemar=tests,
        z=float(z),
    )


def _n(x):
    return float(format_number(x))


def _ci_dict(ci: ConfidenceInterval) -> dict:
    return {
        "point": _n(ci.point),
        "half_width": _n(ci.half_width),
        "lower": _n(ci.lower),
        "upper": _n(ci.upper),
        "level": _n(ci.level),
        "z": _n(ci.z),
    }


def ci_json(ci: ConfidenceInterval) -> bytes:
    doc = _ci_dict(ci)
    doc["method"] = ci.method.value
    doc["n"] = ci.n
    return (json.dumps(doc) + "\n").encode("utf-8")


def ci_line(ci: ConfidenceInterval) -> str:
    return (
        f"accuracy {format_number(ci.point)} +/- {format_number(ci.half_width)} "
        f"[{format_number(ci.lower)}, {format_number(ci.upper)}] "
        f"at {format_number(100 * ci.level)}% (z = {format_number(ci.z)})"
    )


def _mcnemar_dict(pair, res: McNemarResult) -> dict:
    return {
        "model_a": pair[0],
        "model_b": pair[1],
        "b": res.b,
        "c": res.c,
        "statistic": _n(res.statistic),
        "p_chi2": _n(res.p_chi2),
        "p_exact": _n(res.p_exact),
    }


def comparison_json(report: ComparisonReport) -> bytes:
    doc = {
        "z": _n(report.z),
        "level": _n(report.groups[0].interval.level),
        "groups": [
            {
                "label": g.label,
                "correct": g.measurement.correct,
                "total": g.measurement.total,
                "accuracy": _n(g.measurement.accuracy),
                "one_sigma": _ci_dict(g.one_sigma),
                "interval": _ci_dict(g.interval),
            }
            for g in report.groups
        ],
        "overlap": report.overlap,
        "mcnemar": None
        if report.mcnemar is None
        else [_mcnemar_dict(pair, res) for pair, res in report.mcnemar],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def augment_estimates(estimates: Sequence[Estimate], zs: Sequence[float]) -> list:
    """Attach one interval per z to each estimate: [(estimate, [ci, ...]), ...]."""
    if not 1 <= len(zs) <= 2:
        raise UsageError(f"give one or two z values, got {len(zs)}")
    return [(e, [accuracy_ci(e.accuracy, e.n, z) for z in zs]) for e in estimates]


def augmented_header(nz: int) -> tuple:
    cols = ["group", "accuracy", "n"]
    for i in range(1, nz + 1):
        cols += [f"z{i}", f"lo{i}", f"hi{i}"]
    return tuple(cols)


def augmented_csv(rows) -> bytes:
    nz = len(rows[0][1]) if rows else 1

    def fmt(x):
        return format_number(x, AUGMENT_DIGITS)

    out = []
    for est, cis in rows:
        row = [est.group, fmt(est.accuracy), est.n]
        for ci in cis:
            row += [fmt(ci.z), fmt(ci.lower), fmt(ci.upper)]
        out.append(row)
    return write_csv(augmented_header(nz), out)


def chart_from_augmented(rows, title: str = "") -> ChartSpec:
    series = [
        (est.group, est.accuracy, cis[0].half_width, cis[1].half_width if len(cis) > 1 else None)
        for est, cis in rows
    ]
    lows = [min(ci.lower for ci in cis) for _, cis in rows]
    highs = [max(ci.upper for ci in cis) for _, cis in rows]
    lo, hi = min(lows), max(highs)
    pad = 0.1 * (hi - lo) if hi > lo else 0.01
    lo, hi = max(0.0, lo - pad), min(1.0, hi + pad)
    if lo >= hi:
        lo, hi = 0.0, 1.0
    return ChartSpec(title=title, series=series, y_range=(lo, hi))


WIDTH, HEIGHT = 800, 500
_MARGIN = {"left": 80, "right": 20, "top": 50, "bottom": 70}
_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
_GREY = "#b0b0b0"


def _f(x: float) -> str:
    return f"{x:.4f}"


def render_error_bar_svg(spec: ChartSpec) -> bytes:
    """Standalone 800x500 SVG: one slot per series, grey outer whisker behind a coloured one."""
    left, top = _MARGIN["left"], _MARGIN["top"]
    plot_w = WIDTH - left - _MARGIN["right"]
    plot_h = HEIGHT - top - _MARGIN["bottom"]
    ymin, ymax = spec.y_range

    def ypx(v):
        v = min(max(v, ymin), ymax)
        return top + (ymax - v) / (ymax - ymin) * plot_h

    slot = plot_w / len(spec.series)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if spec.title:
        parts.append(
            f'<text x="{_f(WIDTH / 2)}" y="{_f(top / 2)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{escape(spec.title)}</text>'
        )
    # axes and ticks
    parts.append(
        f'<g class="axes" stroke="#000000" stroke-width="1">'
        f'<line x1="{_f(left)}" y1="{_f(top)}" x2="{_f(left)}" y2="{_f(top + plot_h)}"/>'
        f'<line x1="{_f(left)}" y1="{_f(top + plot_h)}" x2="{_f(left + plot_w)}" '
        f'y2="{_f(top + plot_h)}"/></g>'
    )
    for i in range(6):
        v = ymin + (ymax - ymin) * i / 5
        y = ypx(v)
        parts.append(
            f'<line x1="{_f(left - 5)}" y1="{_f(y)}" x2="{_f(left)}" y2="{_f(y)}" stroke="#000000"/>'
            f'<text x="{_f(left - 8)}" y="{_f(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.4f}</text>'
        )

    for i, (label, point, first, second) in enumerate(spec.series):
        x = left + slot * (i + 0.5)
        color = _PALETTE[i % len(_PALETTE)]
        cap = min(12.0, slot / 6)
        if second is not None:
            parts.append(_whisker(x, ypx(point - second), ypx(point + second), cap * 1.5,
                                  _GREY, 6, "whisker-secondary"))
        parts.append(_whisker(x, ypx(point - first), ypx(point + first), cap,
                              color, 2, "whisker-primary"))
        parts.append(
            f'<circle class="point" cx="{_f(x)}" cy="{_f(ypx(point))}" r="4" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_f(x)}" y="{_f(top + plot_h + 20)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{escape(str(label))}</text>'
        )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


def _whisker(x, y_lo, y_hi, cap, color, width, cls):
    return (
        f'<g class="{cls}" stroke="{color}" stroke-width="{width}">'
        f'<line x1="{_f(x)}" y1="{_f(y_lo)}" x2="{_f(x)}" y2="{_f(y_hi)}"/>'
        f'<line x1="{_f(x - cap)}" y1="{_f(y_lo)}" x2="{_f(x + cap)}" y2="{_f(y_lo)}"/>'
        f'<line x1="{_f(x - cap)}" y1="{_f(y_hi)}" x2="{_f(x + cap)}" y2="{_f(y_hi)}"/>'
        "</g>"
    )
