"""Uncertainty estimates for classifier accuracy measurements."""

from .errors import (
    DegenerateDistributionError,
    DomainError,
    FormatError,
    InsufficientDataError,
    IntegrityError,
    MetricsCIError,
    PairingError,
    ParseError,
    UsageError,
)
from .stats import (
    ConfidenceInterval,
    McNemarResult,
    Method,
    SampleStats,
    accuracy_ci,
    fold_sample_ci,
    intervals_overlap,
    level_from_z,
    mcnemar,
    normal_approx_ci,
    normal_cdf,
    normal_quantile,
    sample_stats,
    z_from_level,
)

__version__ = "0.1.0"
