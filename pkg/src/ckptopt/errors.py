"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CkptoptError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CkptoptError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BracketError(CkptoptError, ValueError):
    """A search bracket is empty or inverted (lo >= hi)."""


class ConvergenceError(CkptoptError, ArithmeticError):
    """An iterative kernel exhausted its iteration budget."""


class MeasurementLogError(CkptoptError, ValueError):
    """A measurement log file is malformed.

    Carries the 1-based line number of the offending input when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoFailureObservations(CkptoptError):
    """A failure-rate point estimate was requested but no failures were observed."""
