"""Exception types raised by the relaxation machinery.

Everything derives from StochRelaxError so callers can catch the whole
family at once.  The CLI maps input-side errors to exit code 2 and
numeric failures discovered mid-computation to exit code 3.
"""

from __future__ import annotations


class StochRelaxError(Exception):
    """Base class for all errors raised by this package."""


class DivisionByZeroInterval(StochRelaxError):
    """Denominator interval contains zero, so the quotient is unbounded."""


class OutOfRange(StochRelaxError):
    """A point lies outside the box it is required to belong to."""


class InvalidRelaxationPair(StochRelaxError):
    """A convex estimate exceeds its concave partner beyond snap tolerance."""


class ParseError(StochRelaxError):
    """Model text could not be parsed.  Carries line and column when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class DimensionError(StochRelaxError):
    """Mismatched or out-of-range dimension (variable index, box length, ...)."""


class EvalDomainError(StochRelaxError):
    """Real-valued evaluation hit a point outside an operation's domain."""


class CellOutsideSupport(StochRelaxError):
    """A partition cell is not contained in the distribution's support."""


class ZeroProbabilityCell(StochRelaxError):
    """A partition cell has (numerically) zero probability mass."""


class StepFailure(StochRelaxError):
    """Adaptive integrator could not complete a step within its limits."""


class NonFiniteState(StochRelaxError):
    """Integration produced a NaN or infinite state component."""


class BoundBlowup(StochRelaxError):
    """State bounds exceeded the configured width cap; they carry no information."""
