"""Histogram and Gaussian QQ diagnostics for ensembles of accuracies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .data import write_csv, format_number
from .errors import DegenerateDistributionError, DomainError, InsufficientDataError
from .stats import normal_quantile, sample_stats


@dataclass(frozen=True)
class Histogram:
    bin_edges: list
    counts: list
    n: int


@dataclass(frozen=True)
class QQSeries:
    points: list  # (theoretical, sample), sorted
    mu: float
    sigma: float
    max_abs_deviation: float


def histogram(values: Sequence[float], bins: int) -> Histogram:
    """Equal-width bins over [min, max]; bins are [lo, hi) except the last, which is closed.

    All-equal input gets the span [v - 0.5, v + 0.5] so edges stay strictly
    increasing.
    """
    values = [float(v) for v in values]
    if not values:
        raise InsufficientDataError("histogram of an empty list")
    if isinstance(bins, bool) or not isinstance(bins, int) or bins < 1:
        raise DomainError(f"bins must be a positive integer, got {bins!r}")
    if not all(math.isfinite(v) for v in values):
        raise DomainError("histogram values must be finite")
    lo, hi = min(values), max(values)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    width = (hi - lo) / bins
    edges = [lo + i * width for i in range(bins)] + [hi]

    counts = [0] * bins
    for v in values:
        i = min(int((v - lo) / width), bins - 1)
        # the float division can disagree with the stored edges by an ulp
        while i > 0 and v < edges[i]:
            i -= 1
        while i < bins - 1 and v >= edges[i + 1]:
            i += 1
        counts[i] += 1
    return Histogram(bin_edges=edges, counts=counts, n=len(values))


def plotting_positions(n: int) -> list:
    return [(i - 0.5) / n for i in range(1, n + 1)]


def normal_scores(n: int) -> list:
    """Standard normal quantiles at (i - 0.5)/n, rescaled to mean 0 and sample std 1.

    Raw scores have a sample std slightly below one (0.994 at n = 20), so a
    Gaussian matched to the data's mean and std would not reproduce data that
    are themselves Gaussian quantiles.  Standardizing the scores makes that
    case an exact fixed point.
    """
    z = [normal_quantile(q) for q in plotting_positions(n)]
    st = sample_stats(z)
    return [(v - st.mean) / st.std for v in z]


def qq_gaussian(values: Sequence[float]) -> QQSeries:
    """Pair sorted values with quantiles of a Gaussian at the sample mean and std."""
    if len(values) < 3:
        raise InsufficientDataError(f"QQ analysis needs at least 3 values, got {len(values)}")
    st = sample_stats(values)
    if st.std == 0:
        raise DegenerateDistributionError("all values are equal; sigma is zero")
    ordered = sorted(float(v) for v in values)
    theoretical = [st.mean + st.std * z for z in normal_scores(st.n)]
    points = list(zip(theoretical, ordered))
    dev = max(abs(s - t) for t, s in points)
    return QQSeries(points=points, mu=st.mean, sigma=st.std, max_abs_deviation=dev)


def normality_report(values: Sequence[float], bins: int):
    return histogram(values, bins), qq_gaussian(values)


def histogram_csv(h: Histogram) -> bytes:
    rows = (
        (format_number(h.bin_edges[i]), format_number(h.bin_edges[i + 1]), c)
        for i, c in enumerate(h.counts)
    )
    return write_csv(("bin_lo", "bin_hi", "count"), rows)


def qq_csv(q: QQSeries) -> bytes:
    return write_csv(
        ("theoretical", "sample"),
        ((format_number(t), format_number(s)) for t, s in q.points),
    )
