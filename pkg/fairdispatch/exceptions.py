"""
fairdispatch - Exceptions
"""

from typing import Any, Iterable, List

__all__ = [
    "FairDispatchError",
    "InvalidParameterError",
    "InvalidInstanceError",
    "IngestError",
    "LpDimensionError",
    "LpSolveError",
    "RoundingError",
    "CalibrationError",
    "EnumerationBoundsError",
    "SimulationInvariantError",
    "ConfigFileError",
]


class FairDispatchError(Exception):
    """Root of every error raised by this package."""


class InvalidParameterError(FairDispatchError, ValueError):
    """A parameter lies outside its documented range."""


class InvalidInstanceError(FairDispatchError, ValueError):
    """An instance failed validation; carries the violation list."""

    def __init__(self, violations: Iterable[Any], message: str = ""):
        self.violations: List[Any] = list(violations)
        if not message:
            shown = "; ".join(str(v) for v in self.violations[:5])
            more = len(self.violations) - 5
            message = f"invalid instance: {shown}" + (f" (+{more} more)" if more > 0 else "")
        super().__init__(message)


class IngestError(FairDispatchError):
    """Trip records could not be read or nothing survived the filters."""


class LpDimensionError(FairDispatchError, ValueError):
    """LP model arrays have inconsistent shapes or bounds."""


class LpSolveError(FairDispatchError):
    """The simplex solver could not certify a result."""


class RoundingError(FairDispatchError, ValueError):
    """Bad fractional input, or a draw broke degree preservation."""


class CalibrationError(FairDispatchError):
    """Attenuation table missing, mismatched, or built on a non-unit instance."""


class EnumerationBoundsError(FairDispatchError, ValueError):
    """Instance or model too large for exhaustive enumeration."""


class SimulationInvariantError(FairDispatchError):
    """A trial broke capacity, patience or conservation."""


class ConfigFileError(FairDispatchError, ValueError):
    """Config file unreadable or carrying unknown keys."""
