"""
Custom exceptions for FastDM.

Every error carries a message, an optional details dict and a UTC timestamp so
that the CLI can report a failure and pick an exit code from its type alone.
"""

from typing import Optional, Dict, Any
from datetime import datetime, timezone


class FastDMError(Exception):
    """Base exception for FastDM errors."""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.timestamp = datetime.now(timezone.utc)


class ConfigurationError(FastDMError):
    """Invalid solver, sampler or benchmark configuration."""

    exit_code = 5


class ValidationError(FastDMError):
    """Input data violates a domain invariant."""

    exit_code = 5


class DomainError(ValidationError):
    """Argument outside the domain of a special function or density."""


class DimensionMismatchError(ValidationError):
    """Category counts disagree between two operands."""

    def __init__(
        self,
        message: str,
        expected: int,
        actual: int,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message, {"expected": expected, "actual": actual, **(details or {})})
        self.expected = expected
        self.actual = actual


class EmptyDataError(ValidationError):
    """No row with a positive total was ingested."""


class TallyOverflowError(FastDMError):
    """A tally would exceed the 64-bit integer range."""

    exit_code = 5


class DatasetParseError(FastDMError):
    """Malformed dataset or stats file."""

    exit_code = 5

    def __init__(
        self,
        message: str,
        line_number: Optional[int] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message, details)
        self.line_number = line_number


class StatsFormatError(DatasetParseError):
    """Stats file has an unknown version or inconsistent shape."""


class NumericalError(FastDMError):
    """A numerical step could not be carried out."""

    exit_code = 6


class SingularHessianError(NumericalError):
    """The structured Hessian cannot be inverted."""


class DegenerateDenominatorError(NumericalError):
    """Fixed-point update denominator is not positive."""


class DivergenceError(FastDMError):
    """The likelihood is unbounded and alpha ran past the cap."""

    exit_code = 4


class BoundaryEstimateError(DivergenceError):
    """Some alpha component is heading to zero."""


class IterationLimitError(FastDMError):
    """Solver hit max_iters before meeting the gradient tolerance."""

    exit_code = 3

    def __init__(
        self,
        message: str,
        report: Any = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message, details)
        self.report = report
