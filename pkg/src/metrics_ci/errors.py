"""Exception types shared by every module.

Everything raised on bad input derives from ``MetricsCIError`` and from
``ValueError``, so callers that only care about "bad data" can catch either.
"""


class MetricsCIError(Exception):
    """Base class for all library errors."""


class DomainError(MetricsCIError, ValueError):
    """An argument lies outside the domain of the operation."""


class InsufficientDataError(MetricsCIError, ValueError):
    """Too few values to compute the requested statistic."""


class DegenerateDistributionError(DomainError):
    """The input has zero spread where a positive spread is required."""


class FormatError(MetricsCIError, ValueError):
    """A file does not follow its declared layout."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(FormatError):
    """A field could not be converted to its declared type."""


class IntegrityError(MetricsCIError, ValueError):
    """Records contradict each other (duplicate keys, conflicting labels)."""


class PairingError(MetricsCIError, ValueError):
    """Two prediction sets do not cover the same samples."""


class UsageError(MetricsCIError):
    """The request is well formed data-wise but asks for something unsupported."""
