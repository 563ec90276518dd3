"""Normal-distribution helpers, accuracy confidence intervals and McNemar's test.

The standard normal CDF is evaluated through ``math.erfc`` and the quantile
function through :class:`statistics.NormalDist`, which implements Wichura's
AS241 rational approximation (relative error around 1e-16).  Both are pinned
by golden tests against arbitrary-precision values.
"""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Optional, Sequence

from .errors import DomainError, InsufficientDataError

_SQRT2 = math.sqrt(2.0)
_STANDARD_NORMAL = NormalDist()


class Method(str, enum.Enum):
    NORMAL_APPROX = "NormalApprox"
    FOLD_SAMPLE_STD = "FoldSampleStd"


@dataclass(frozen=True)
class ConfidenceInterval:
    """Accuracy point estimate with a symmetric, domain-clamped interval.

    ``half_width`` is kept unclamped so the raw value can be reported even when
    ``lower``/``upper`` have been cut at 0 or 1.
    """

    point: float
    half_width: float
    lower: float
    upper: float
    level: float
    z: float
    method: Method
    n: Optional[int] = None

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class SampleStats:
    n: int
    mean: float
    min: float
    max: float
    _std: Optional[float] = field(default=None, repr=False)

    @property
    def std(self) -> float:
        """Unbiased sample standard deviation (n - 1 denominator)."""
        if self._std is None:
            raise InsufficientDataError(
                f"standard deviation needs at least 2 values, got {self.n}"
            )
        return self._std


@dataclass(frozen=True)
class McNemarResult:
    b: int
    c: int
    statistic: float
    p_chi2: float
    p_exact: float


def _check_finite(x, name="x"):
    try:
        ok = math.isfinite(x)
    except TypeError:
        raise DomainError(f"{name} must be a real number, got {x!r}") from None
    if not ok:
        raise DomainError(f"{name} must be finite, got {x!r}")


def _check_count(k, name):
    if isinstance(k, bool) or not isinstance(k, numbers.Integral):
        raise DomainError(f"{name} must be an integer count, got {k!r}")
    if k < 0:
        raise DomainError(f"{name} must be nonnegative, got {k}")
    return int(k)


def normal_sf(x: float) -> float:
    """Upper tail 1 - Phi(x), accurate far into the right tail."""
    _check_finite(x)
    return 0.5 * math.erfc(x / _SQRT2)


def normal_cdf(x: float) -> float:
    """Standard normal CDF.

    For x >= 0 the value is formed as ``1 - normal_sf(x)`` so that
    ``normal_cdf(-x) == 1 - normal_cdf(x)`` holds whenever the subtraction is
    exact in floating point.
    """
    _check_finite(x)
    if x >= 0:
        return 1.0 - 0.5 * math.erfc(x / _SQRT2)
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_quantile(p: float) -> float:
    _check_finite(p, "p")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie strictly between 0 and 1, got {p!r}")
    return _STANDARD_NORMAL.inv_cdf(p)


def z_from_level(level: float) -> float:
    """Two-sided critical value: the 1 - alpha/2 quantile with alpha = 1 - level."""
    _check_finite(level, "level")
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")
    return normal_quantile(1.0 - (1.0 - level) / 2.0)


def level_from_z(z: float) -> float:
    """Coverage 2*Phi(z) - 1 of a symmetric +/- z interval."""
    _check_finite(z, "z")
    if z <= 0:
        raise DomainError(f"z must be positive, got {z!r}")
    return math.erf(z / _SQRT2)


def _interval(point, half_width, z, method, n=None):
    return ConfidenceInterval(
        point=point,
        half_width=half_width,
        lower=max(0.0, point - half_width),
        upper=min(1.0, point + half_width),
        level=level_from_z(z),
        z=float(z),
        method=method,
        n=n,
    )


def accuracy_ci(accuracy: float, n: int, z: float) -> ConfidenceInterval:
    """Normal-approximation interval from an accuracy value and holdout size.

    half_width = z * sqrt(acc * (1 - acc) / n)
    """
    _check_finite(accuracy, "accuracy")
    if not 0.0 <= accuracy <= 1.0:
        raise DomainError(f"accuracy must lie in [0, 1], got {accuracy!r}")
    n = _check_count(n, "n")
    if n < 1:
        raise DomainError("n must be at least 1")
    _check_finite(z, "z")
    if z <= 0:
        raise DomainError(f"z must be positive, got {z!r}")
    half_width = z * math.sqrt(accuracy * (1.0 - accuracy) / n)
    return _interval(accuracy, half_width, z, Method.NORMAL_APPROX, n)


def normal_approx_ci(correct: int, n: int, z: float) -> ConfidenceInterval:
    correct = _check_count(correct, "correct")
    n = _check_count(n, "n")
    if n < 1:
        raise DomainError("n must be at least 1")
    if correct > n:
        raise DomainError(f"correct ({correct}) exceeds n ({n})")
    return accuracy_ci(correct / n, n, z)


def sample_stats(values: Sequence[float]) -> SampleStats:
    values = [float(v) for v in values]
    if not values:
        raise InsufficientDataError("no values given")
    for v in values:
        _check_finite(v, "value")
    n = len(values)
    lo, hi = min(values), max(values)
    # fsum/n can land one ulp outside [min, max] when all values are equal
    mean = min(max(math.fsum(values) / n, lo), hi)
    std = None
    if n >= 2:
        dev = [v - mean for v in values]
        # scaled so tiny deviations do not underflow to zero when squared
        scale = max(abs(d) for d in dev)
        std = 0.0
        if scale > 0:
            std = scale * math.sqrt(math.fsum((d / scale) ** 2 for d in dev) / (n - 1))
    return SampleStats(n=n, mean=mean, min=lo, max=hi, _std=std)


def fold_sample_ci(accuracies: Sequence[float], z: float) -> ConfidenceInterval:
    """Interval from the spread of per-fold accuracies: mean +/- z * std."""
    if len(accuracies) < 2:
        raise InsufficientDataError(
            f"fold-sample interval needs at least 2 accuracies, got {len(accuracies)}"
        )
    for a in accuracies:
        _check_finite(a, "accuracy")
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"accuracy must lie in [0, 1], got {a!r}")
    _check_finite(z, "z")
    if z <= 0:
        raise DomainError(f"z must be positive, got {z!r}")
    st = sample_stats(accuracies)
    return _interval(st.mean, z * st.std, z, Method.FOLD_SAMPLE_STD)


def intervals_overlap(a: ConfidenceInterval, b: ConfidenceInterval) -> bool:
    # touching endpoints count as overlap
    return max(a.lower, b.lower) <= min(a.upper, b.upper)


def binomial_tail_half(k: int, m: int) -> int:
    """Numerator of P(X <= k) for X ~ Binomial(m, 1/2); the denominator is 2**m."""
    return sum(math.comb(m, i) for i in range(k + 1))


def mcnemar(b: int, c: int) -> McNemarResult:
    """McNemar's test on the two discordant counts.

    ``b``: model A right and model B wrong; ``c``: the reverse.  The
    continuity-corrected statistic is floored at zero so that b == c gives
    statistic 0 and p = 1.  The exact p-value doubles the smaller binomial
    tail and caps at 1.
    """
    b = _check_count(b, "b")
    c = _check_count(c, "c")
    m = b + c
    if m == 0:
        return McNemarResult(b=b, c=c, statistic=0.0, p_chi2=1.0, p_exact=1.0)
    statistic = max(abs(b - c) - 1, 0) ** 2 / m
    p_chi2 = min(1.0, 2.0 * normal_sf(math.sqrt(statistic)))
    # exact integer ratio; int / int is correctly rounded even for huge m
    p_exact = min(1.0, 2 * binomial_tail_half(min(b, c), m) / 2**m)
    return McNemarResult(b=b, c=c, statistic=statistic, p_chi2=p_chi2, p_exact=p_exact)
