"""Grid-search fit of the citation tail law to one researcher's record.

The fit compares the empirical tail cdf with the model tail

    Cbar_theo(x) = (1 + a*x)**(-b),   a = 1/(<x>*(b-1)),

where <x> is the record's own mean, so b is the single free parameter.  The
loss is the mean squared relative deviation of log tails:

    s(b) = (1/W) * sum over fit points of
           ((ln Cbar_emp - ln Cbar_theo) / ln Cbar_emp)**2

Fit points are the distinct observed citation values x >= 1 whose empirical
tail is strictly below 1; zero-citation publications still enter N_pub and
the mean.  The loss is evaluated on an inclusive b grid and the smallest
minimizer wins ties.  A fit is accepted only when the loss clears the
cutoff, the minimizer is interior to the grid, and enough points exist.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import numpy as np

from .empirical import CitationRecord
from .errors import DegenerateRecordError, TooFewPointsError
from .pareto import B_MAX

__all__ = [
    "FitConfig",
    "FitResult",
    "RejectionReason",
    "CollapseHistogram",
    "fit_loss",
    "fit",
    "fit_cohort",
    "collapse_coordinates",
]


class RejectionReason(enum.Enum):
    NONE = "none"
    LOSS_ABOVE_CUTOFF = "loss_above_cutoff"
    B_AT_GRID_BOUNDARY = "b_at_grid_boundary"
    TOO_FEW_POINTS = "too_few_points"


@dataclass(frozen=True)
class FitConfig:
    """Grid bounds and acceptance thresholds for the tail-law fit."""

    b_min: float = 1.025
    b_max: float = 8.0
    b_step: float = 0.025
    s_cutoff: float = 0.2
    min_points: int = 3

    def __post_init__(self) -> None:
        if not 1.0 < self.b_min < self.b_max <= B_MAX:
            raise ValueError("grid must satisfy 1 < b_min < b_max <= "
                             f"{B_MAX:g}, got [{self.b_min!r}, {self.b_max!r}]")
        if not 0.0 < self.b_step <= self.b_max - self.b_min:
            raise ValueError(f"b_step out of range: {self.b_step!r}")
        if not self.s_cutoff > 0.0:
            raise ValueError(f"s_cutoff must be positive, got {self.s_cutoff!r}")
        if self.min_points < 1:
            raise ValueError(f"min_points must be at least 1, got {self.min_points!r}")

    def grid(self) -> np.ndarray:
        """Inclusive b grid b_min, b_min + step, ..., up to and including b_max."""
        steps = int(round((self.b_max - self.b_min) / self.b_step))
        grid = self.b_min + self.b_step * np.arange(steps + 1)
        # Rounding may overshoot when the span is not a step multiple.
        if grid[-1] > self.b_max + 1e-9 * max(1.0, self.b_max):
            grid = grid[:-1]
        return grid


@dataclass(frozen=True)
class FitResult:
    b_hat: float
    a_hat: float
    s_min: float
    w: int
    accepted: bool
    rejection_reason: RejectionReason

    def __post_init__(self) -> None:
        if self.accepted != (self.rejection_reason is RejectionReason.NONE):
            raise ValueError("accepted flag must match rejection_reason")


def _fit_points(record: CitationRecord) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values x >= 1 with empirical tail cdf < 1, plus those tails."""
    arr = np.asarray(record.citations)
    if np.all(arr == arr[0]):
        raise DegenerateRecordError(
            f"record {record.id!r} has all citation counts equal; no tail shape to fit")
    values, counts = np.unique(arr, return_counts=True)
    tail = np.cumsum(counts[::-1])[::-1] / record.n_pub
    keep = (values >= 1) & (tail < 1.0)
    return values[keep].astype(float), tail[keep]


def _loss_on_grid(xs: np.ndarray, tails: np.ndarray, mean: float,
                  b_grid: np.ndarray) -> np.ndarray:
    log_ce = np.log(tails)
    a_grid = 1.0 / (mean * (b_grid - 1.0))
    log_ratio = log_ce[None, :] + b_grid[:, None] * np.log1p(a_grid[:, None] * xs[None, :])
    rel = log_ratio / log_ce[None, :]
    return np.mean(rel * rel, axis=1)


def fit_loss(record: CitationRecord, b: float, config: FitConfig = FitConfig()) -> float:
    """Loss s(b) for one candidate shape exponent."""
    if not b > 1.0:
        raise ValueError(f"shape b must exceed 1, got {b!r}")
    xs, tails = _fit_points(record)
    if xs.size < config.min_points:
        raise TooFewPointsError(
            f"record {record.id!r} has {xs.size} usable fit points, "
            f"needs {config.min_points}")
    return float(_loss_on_grid(xs, tails, record.mean, np.array([float(b)]))[0])


def fit(record: CitationRecord, config: FitConfig = FitConfig()) -> FitResult:
    """Grid search over b; unusable records come back rejected, not raised."""
    try:
        xs, tails = _fit_points(record)
    except DegenerateRecordError:
        xs = np.empty(0)
        tails = np.empty(0)
    if xs.size < config.min_points:
        return FitResult(b_hat=math.nan, a_hat=math.nan, s_min=math.nan,
                         w=int(xs.size), accepted=False,
                         rejection_reason=RejectionReason.TOO_FEW_POINTS)
    grid = config.grid()
    losses = _loss_on_grid(xs, tails, record.mean, grid)
    idx = int(np.argmin(losses))  # ties resolve to the smallest b
    b_hat = float(grid[idx])
    s_min = float(losses[idx])
    a_hat = 1.0 / (record.mean * (b_hat - 1.0))
    if idx == 0 or idx == grid.size - 1:
        reason = RejectionReason.B_AT_GRID_BOUNDARY
    elif s_min > config.s_cutoff:
        reason = RejectionReason.LOSS_ABOVE_CUTOFF
    else:
        reason = RejectionReason.NONE
    return FitResult(b_hat=b_hat, a_hat=a_hat, s_min=s_min, w=int(xs.size),
                     accepted=reason is RejectionReason.NONE,
                     rejection_reason=reason)


def fit_cohort(records: Sequence[CitationRecord],
               config: FitConfig = FitConfig(),
               *, workers: int = 1) -> list[FitResult]:
    """Fit every record, preserving input order; workers > 1 fans out per record."""
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers!r}")
    if workers == 1 or len(records) < 2:
        return [fit(r, config) for r in records]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(records) // (workers * 4))
        return list(pool.map(partial(fit, config=config), records, chunksize=chunk))


@dataclass(frozen=True)
class CollapseHistogram:
    """Log-binned density of citations rescaled by the record mean."""

    bin_edges: np.ndarray
    counts: np.ndarray
    densities: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2.0

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(float(c), float(d)) for c, d in zip(self.centers, self.densities)]


def collapse_coordinates(record: CitationRecord, *, n_bins: int = 40) -> CollapseHistogram:
    """Histogram of x/<x> with geometric bins, normalized to unit total mass.

    Zero-citation publications fall into one extra linear bin [0, lowest
    positive edge) so the emitted density still integrates to 1 and its
    first moment stays at the rescaled mean up to binning resolution.
    """
    if n_bins < 1:
        raise ValueError(f"n_bins must be at least 1, got {n_bins!r}")
    arr = np.asarray(record.citations, dtype=float)
    if np.all(arr == arr[0]):
        raise DegenerateRecordError(
            f"record {record.id!r} has all citation counts equal; nothing to collapse")
    scaled = arr / record.mean
    positive = scaled[scaled > 0.0]
    lo = float(positive.min())
    hi = float(positive.max())
    if lo == hi:
        edges = np.array([lo * 0.95, lo * 1.05])
    else:
        edges = np.geomspace(lo, hi, n_bins + 1)
    if positive.size < scaled.size:
        edges = np.concatenate(([0.0], edges))
    counts, edges = np.histogram(scaled, bins=edges)
    widths = np.diff(edges)
    densities = counts / (scaled.size * widths)
    return CollapseHistogram(bin_edges=edges, counts=counts, densities=densities)
