"""Exception hierarchy shared by every module."""

from __future__ import annotations


class GbsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GbsError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateLawError(DomainError):
    """An affine map with zero slope would collapse the law to a point mass."""


class QuadratureError(GbsError, ArithmeticError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3g})")
        self.error_estimate = error_estimate


class BracketError(GbsError, ArithmeticError):
    """A root bracket could not be established within the expansion cap."""


class SampleSizeError(GbsError, ValueError):
    """Too few observations for the requested tuning values."""


class TailPositivityError(GbsError, ValueError):
    """The Hill pivot order statistic is not strictly positive."""


class BandwidthError(GbsError, ValueError):
    """No block sum fell inside the bandwidth window, so the scale is undefined."""


class RunawayError(GbsError, RuntimeError):
    """A first-passage replication exceeded the cycle cap."""


class InputError(GbsError, ValueError):
    """Malformed or invalid input file contents.

    ``line`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line
