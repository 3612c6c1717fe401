"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "CitescaleError",
    "QuadratureError",
    "BracketError",
    "ZeroCitationsError",
    "DegenerateRecordError",
    "TooFewPointsError",
    "CohortValidationError",
    "EmptyCohortError",
]


class CitescaleError(Exception):
    """Base class for package-specific failures."""


class QuadratureError(CitescaleError):
    """Numerical integration could not reach the requested tolerance."""

    def __init__(self, message: str, *, achieved: float | None = None,
                 required: float | None = None):
        if achieved is not None and required is not None:
            message = f"{message} (achieved {achieved:.3e}, required {required:.3e})"
        super().__init__(message)
        self.achieved = achieved
        self.required = required


class BracketError(CitescaleError):
    """A root bracket could not be established for a transcendental equation."""


class ZeroCitationsError(CitescaleError, ValueError):
    """Metric undefined because the record has zero total citations."""


class DegenerateRecordError(CitescaleError, ValueError):
    """All citation counts in the record are equal: no usable tail points."""


class TooFewPointsError(CitescaleError, ValueError):
    """Fewer usable fit points than the configured minimum."""


class CohortValidationError(CitescaleError, ValueError):
    """One or more records failed validation.

    ``problems`` holds every (line_number, message) pair found, so a bad file
    is reported in full rather than failing on the first defect.
    """

    def __init__(self, problems: list[tuple[int, str]]):
        self.problems = list(problems)
        shown = "; ".join(f"line {ln}: {msg}" for ln, msg in self.problems[:5])
        extra = len(self.problems) - 5
        if extra > 0:
            shown += f"; and {extra} more"
        super().__init__(f"{len(self.problems)} invalid record(s): {shown}")


class EmptyCohortError(CitescaleError, ValueError):
    """No records remain after filtering or acceptance."""
