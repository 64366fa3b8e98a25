"""Error types raised by the numerical services.

Input problems subclass ValueError so callers that only know about the
standard library still catch them.
"""
from typing import Optional


class LiftZonoidError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LiftZonoidError, ValueError):
    """An argument lies outside the domain of the operation."""


class InfiniteQuantileError(DomainError):
    """The Gaussian quantile of 0 or 1 is infinite."""


class UnboundedSupportError(DomainError):
    """A grid quantile was requested at probability 0 or 1."""


class InvalidDensityError(LiftZonoidError, ValueError):
    """Density samples are negative, non-finite or identically zero."""


class ZeroDensityError(LiftZonoidError, ZeroDivisionError):
    """A quantity divides by a density value that is zero."""


class HeavyTailError(LiftZonoidError):
    """No positive epsilon keeps the square-exponential moment below 2."""


class IntegrationFailureError(LiftZonoidError):
    """The flow integrator could not reach the final time."""


class WindowOverflowError(LiftZonoidError):
    """A mapped interval left the grid window."""


class ConstructionError(LiftZonoidError, ValueError):
    """Example-measure parameters violate their defining conditions."""


class InputFormatError(LiftZonoidError, ValueError):
    """An input file is malformed; `field` names the offending entry."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field
