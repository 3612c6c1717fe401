"""Hirsch-index scaling relations and cohort-level aggregation.

Each researcher maps to a point (h/N_pub, sqrt(N_cit)/N_pub).  For the
citation law with shape b the two coordinates are tied by

    sqrt(N_cit)/N_pub = sqrt(r / ((b-1) * (r**(-1/b) - 1))),   r = h/N_pub,

and h itself solves h/N_pub = (1 + h*N_pub/((b-1)*N_cit))**(-b).  Two
model-free checks accompany the curve: the statistical bound
N_cit >= e * h**2 and the arithmetic bound N_cit >= h**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize

from .cohort import SummaryRow, resolve_preset
from .empirical import CitationRecord, gini_pairwise, h_index
from .errors import BracketError, EmptyCohortError, ZeroCitationsError
from .fitting import FitResult

__all__ = [
    "ScalingPoint",
    "BinConfig",
    "CohortSummary",
    "pareto_hirsch_solve",
    "impscale_curve",
    "bound_check",
    "point_from_counts",
    "two_h_trend",
    "build_summary_rows",
    "summarize_cohort",
    "bound_violation_report",
]

E_BOUND = math.e


@dataclass(frozen=True)
class ScalingPoint:
    """One researcher's scaling coordinates and bound flags."""

    id: str
    x_coord: float            # h / N_pub
    y_coord: float            # sqrt(N_cit) / N_pub
    lam: float                # N_pub**2 / N_cit, NaN when N_cit = 0
    violates_e_bound: bool    # N_cit < e * h**2
    violates_obvious_bound: bool  # N_cit < h**2


def pareto_hirsch_solve(b: float, n_pub: float, n_cit: float,
                        *, max_iter: int = 200, rtol: float = 1e-12) -> float:
    """Root h of h/N_pub = (1 + h*N_pub/((b-1)*N_cit))**(-b) in (0, N_pub]."""
    if not b > 1.0:
        raise ValueError(f"shape b must exceed 1, got {b!r}")
    if n_pub < 1 or n_cit < 1:
        raise ValueError("n_pub and n_cit must be at least 1")
    coef = n_pub / ((b - 1.0) * n_cit)

    def g(h: float) -> float:
        return h / n_pub - math.exp(-b * math.log1p(coef * h))

    lo, hi = 0.0, float(n_pub)
    g_hi = g(hi)
    if g_hi < 0.0:
        raise BracketError("no root bracket: equation has no crossing in (0, N_pub]")
    if g_hi == 0.0:
        return hi
    return float(optimize.bisect(g, lo, hi, xtol=1e-12, rtol=rtol, maxiter=max_iter))


def impscale_curve(b: float, r) -> float | np.ndarray:
    """sqrt(N_cit)/N_pub as a function of r = h/N_pub for shape b."""
    if not b > 1.0:
        raise ValueError(f"shape b must exceed 1, got {b!r}")
    arr = np.asarray(r, dtype=float)
    if np.any((arr <= 0.0) | (arr >= 1.0)):
        raise ValueError("r must lie strictly inside (0, 1)")
    out = np.sqrt(arr / ((b - 1.0) * np.expm1(-np.log(arr) / b)))
    return float(out) if out.ndim == 0 else out


def point_from_counts(rid: str, n_pub: int, n_cit: int, h: int) -> ScalingPoint:
    """Scaling point from exact integer totals; N_cit = 0 flags nothing but leaves lam NaN."""
    if n_pub < 1:
        raise ValueError("n_pub must be at least 1")
    x = h / n_pub
    y = math.sqrt(n_cit) / n_pub
    lam = (n_pub * n_pub) / n_cit if n_cit > 0 else math.nan
    return ScalingPoint(id=rid, x_coord=x, y_coord=y, lam=lam,
                        violates_e_bound=n_cit < E_BOUND * h * h,
                        violates_obvious_bound=n_cit < h * h)


def bound_check(record: CitationRecord) -> ScalingPoint:
    """Scaling coordinates and bound flags for one record."""
    return point_from_counts(record.id, record.n_pub, record.n_cit, h_index(record))


def two_h_trend(points: Sequence[ScalingPoint]) -> float:
    """Median of sqrt(N_cit)/h over points; skips points with h = 0."""
    ratios = [p.y_coord / p.x_coord for p in points
              if p.x_coord > 0.0 and math.isfinite(p.y_coord)]
    if not ratios:
        raise EmptyCohortError("no points with positive h to take a trend over")
    return float(np.median(ratios))


def build_summary_rows(records: Sequence[CitationRecord],
                       fits: Sequence[FitResult]) -> list[SummaryRow]:
    """Join records with their fit results into summary rows (order preserved)."""
    if len(records) != len(fits):
        raise ValueError("records and fits must align one-to-one")
    rows = []
    for record, result in zip(records, fits):
        point = bound_check(record)
        try:
            gini = gini_pairwise(record)
        except ZeroCitationsError:
            gini = math.nan
        rows.append(SummaryRow(
            id=record.id, n_pub=record.n_pub, n_cit=record.n_cit,
            h=h_index(record), gini=gini, b_hat=result.b_hat, a_hat=result.a_hat,
            s_min=result.s_min, w=result.w, accepted=result.accepted,
            violates_e_bound=point.violates_e_bound))
    return rows


@dataclass(frozen=True)
class BinConfig:
    """Binning choices for cohort histograms and the density grid."""

    b_bins: int = 48
    b_lo: float = 1.025
    b_hi: float = 8.0
    gini_bins: int = 50
    grid_nx: int = 200
    grid_ny: int = 200
    grid_x_max: float = 1.0
    grid_y_max: float = 3.0

    def __post_init__(self) -> None:
        if min(self.b_bins, self.gini_bins, self.grid_nx, self.grid_ny) < 1:
            raise ValueError("bin counts must be at least 1")
        if not 1.0 < self.b_lo < self.b_hi:
            raise ValueError("need 1 < b_lo < b_hi")
        if not (self.grid_x_max > 0.0 and self.grid_y_max > 0.0):
            raise ValueError("grid extents must be positive")


@dataclass(frozen=True)
class CohortSummary:
    """Cohort aggregates over the records passing the chosen filter preset."""

    preset: str
    b_bin_edges: np.ndarray
    b_counts: np.ndarray
    gini_bin_edges: np.ndarray
    gini_counts: np.ndarray
    grid_x_edges: np.ndarray
    grid_y_edges: np.ndarray
    grid_counts: np.ndarray
    b_mode: float
    b_mean: float
    gini_mode: float
    e_bound_violation_rate: float
    two_h_median: float
    record_counts: dict = field(default_factory=dict)


def _mode_center(edges: np.ndarray, counts: np.ndarray, *, geometric: bool) -> float:
    idx = int(np.argmax(counts))  # ties resolve to the lowest bin
    lo, hi = edges[idx], edges[idx + 1]
    return float(math.sqrt(lo * hi)) if geometric else float((lo + hi) / 2.0)


def summarize_cohort(rows: Sequence[SummaryRow],
                     preset: str | tuple[int, int] = "strict",
                     bins: BinConfig = BinConfig()) -> CohortSummary:
    """Histograms, modes, and violation rate over the filtered cohort.

    Exponent and Gini histograms cover accepted fits only, so each sums to
    the accepted-record count; the e-bound violation rate is model-free and
    counts every filter-passing record.
    """
    n_pub_min, n_cit_min = resolve_preset(preset)
    kept = [r for r in rows if r.n_pub >= n_pub_min and r.n_cit >= n_cit_min]
    if not kept:
        raise EmptyCohortError(
            f"no records pass the {preset!r} filter (of {len(rows)} supplied)")
    accepted = [r for r in kept if r.accepted]
    if not accepted:
        raise EmptyCohortError(
            f"no accepted fits among the {len(kept)} records passing {preset!r}")
    fitted = sum(1 for r in kept if r.w >= 1 and math.isfinite(r.b_hat))

    b_edges = np.geomspace(bins.b_lo, bins.b_hi, bins.b_bins + 1)
    b_values = np.array([r.b_hat for r in accepted])
    b_counts, _ = np.histogram(b_values, bins=b_edges)
    gini_edges = np.linspace(0.0, 1.0, bins.gini_bins + 1)
    gini_counts, _ = np.histogram(np.array([r.gini for r in accepted]), bins=gini_edges)

    points = [point_from_counts(r.id, r.n_pub, r.n_cit, r.h) for r in accepted]
    xs = np.array([p.x_coord for p in points])
    ys = np.array([p.y_coord for p in points])
    grid_counts, gx, gy = np.histogram2d(
        xs, ys, bins=[np.linspace(0.0, bins.grid_x_max, bins.grid_nx + 1),
                      np.linspace(0.0, bins.grid_y_max, bins.grid_ny + 1)])

    violations = sum(1 for r in kept if r.violates_e_bound)
    counts = {
        "total": len(rows),
        "filtered_out": len(rows) - len(kept),
        "fitted": fitted,
        "rejected": len(kept) - len(accepted),
        "accepted": len(accepted),
    }
    return CohortSummary(
        preset=preset if isinstance(preset, str) else f"custom{tuple(preset)!r}",
        b_bin_edges=b_edges, b_counts=b_counts,
        gini_bin_edges=gini_edges, gini_counts=gini_counts,
        grid_x_edges=gx, grid_y_edges=gy, grid_counts=grid_counts.astype(np.int64),
        b_mode=_mode_center(b_edges, b_counts, geometric=True),
        b_mean=float(np.mean(b_values)),
        gini_mode=_mode_center(gini_edges, gini_counts, geometric=False),
        e_bound_violation_rate=violations / len(kept),
        two_h_median=two_h_trend(points),
        record_counts=counts,
    )


def bound_violation_report(rows: Sequence[SummaryRow],
                           preset: str | tuple[int, int]) -> dict:
    """Model-free bound violation counts over the records passing a preset."""
    n_pub_min, n_cit_min = resolve_preset(preset)
    kept = [r for r in rows if r.n_pub >= n_pub_min and r.n_cit >= n_cit_min]
    n = len(kept)
    e_violations = sum(1 for r in kept if r.violates_e_bound)
    obvious = sum(1 for r in kept if r.n_cit < r.h * r.h)
    return {
        "preset": preset if isinstance(preset, str) else f"custom{tuple(preset)!r}",
        "n_records": n,
        "e_bound_violations": e_violations,
        "e_bound_rate": e_violations / n if n else math.nan,
        "obvious_bound_violations": obvious,
        "obvious_bound_rate": obvious / n if n else math.nan,
    }
