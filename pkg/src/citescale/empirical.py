"""Model-free metrics of a single researcher's citation record."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroCitationsError

__all__ = [
    "CitationRecord",
    "LorenzCurve",
    "h_index",
    "gini_pairwise",
    "gini_lorenz",
    "empirical_tail",
    "lorenz_curve",
    "empirical_gintropy",
]


@dataclass(frozen=True)
class CitationRecord:
    """One researcher: an id and one citation count per publication."""

    id: str
    citations: tuple[int, ...]

    def __post_init__(self) -> None:
        cits = tuple(int(c) for c in self.citations)
        if len(cits) == 0:
            raise ValueError(f"record {self.id!r} has no publications")
        if any(c < 0 for c in cits):
            raise ValueError(f"record {self.id!r} has negative citation counts")
        object.__setattr__(self, "citations", cits)

    @property
    def n_pub(self) -> int:
        return len(self.citations)

    @property
    def n_cit(self) -> int:
        return sum(self.citations)

    @property
    def mean(self) -> float:
        return self.n_cit / self.n_pub


@dataclass(frozen=True)
class LorenzCurve:
    """Tail-form Lorenz curve: points (cbar, fbar) from (1, 1) down to (0, 0)."""

    points: tuple[tuple[float, float], ...]

    @property
    def cbar(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def fbar(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def h_index(record: CitationRecord) -> int:
    """Largest h such that at least h publications have at least h citations."""
    ranked = np.sort(np.asarray(record.citations))[::-1]
    ranks = np.arange(1, ranked.size + 1)
    return int(np.count_nonzero(ranked >= ranks))


def gini_pairwise(record: CitationRecord) -> float:
    """Gini index as the mean absolute pairwise difference over 2*<x>.

    Uses the exact rank identity sum_ij |x_i - x_j| = 2 * sum_i (2i-n-1) x_(i)
    on the ascending order statistics, evaluated in integer arithmetic, so the
    only rounding is the final division.  Population convention: denominator
    2 * n**2 * <x> = 2 * n * N_cit, no finite-sample correction.
    """
    total = record.n_cit
    if total == 0:
        raise ZeroCitationsError(f"record {record.id!r} has zero total citations")
    xs = sorted(record.citations)
    n = len(xs)
    weighted = sum((2 * i - n - 1) * x for i, x in enumerate(xs, start=1))
    return weighted / (n * total)


def _tail_steps(record: CitationRecord):
    """Distinct values ascending with their tail count and citation-mass shares."""
    values, counts = np.unique(np.asarray(record.citations), return_counts=True)
    tail_counts = np.cumsum(counts[::-1])[::-1]
    mass = values * counts
    tail_mass = np.cumsum(mass[::-1])[::-1]
    return values, tail_counts / record.n_pub, tail_mass / record.n_cit


def empirical_tail(record: CitationRecord, x: float) -> tuple[float, float]:
    """(cbar, fbar) at threshold x: shares of publications and of citations at or above x."""
    if x < 0:
        raise ValueError("threshold x must be non-negative")
    arr = np.asarray(record.citations)
    cbar = np.count_nonzero(arr >= x) / record.n_pub
    total = record.n_cit
    if total == 0:
        raise ZeroCitationsError(f"record {record.id!r} has zero total citations")
    fbar = float(arr[arr >= x].sum()) / total
    return float(cbar), fbar


def lorenz_curve(record: CitationRecord) -> LorenzCurve:
    """Empirical tail-form Lorenz curve, one point per distinct citation value.

    The first point is (1, 1) (threshold at the smallest value) and a final
    (0, 0) closes the curve above the largest value.
    """
    if record.n_cit == 0:
        raise ZeroCitationsError(f"record {record.id!r} has zero total citations")
    _, cbar, fbar = _tail_steps(record)
    points = [(float(c), float(f)) for c, f in zip(cbar, fbar)]
    points.append((0.0, 0.0))
    return LorenzCurve(points=tuple(points))


def gini_lorenz(record: CitationRecord) -> float:
    """Gini index as twice the area between the Lorenz curve and the diagonal.

    Trapezoid rule over the piecewise-linear curve; agrees with the pairwise
    estimator to rounding error.
    """
    curve = lorenz_curve(record)
    cbar = curve.cbar
    fbar = curve.fbar
    # Points run from cbar = 1 down to 0; integrate fbar d(cbar).
    area = float(np.sum((fbar[:-1] + fbar[1:]) * (cbar[:-1] - cbar[1:])) / 2.0)
    return 2.0 * (area - 0.5)


def empirical_gintropy(record: CitationRecord) -> list[tuple[float, float]]:
    """(threshold, fbar - cbar) at every distinct citation value, ascending."""
    if record.n_cit == 0:
        raise ZeroCitationsError(f"record {record.id!r} has zero total citations")
    values, cbar, fbar = _tail_steps(record)
    return [(float(v), float(f - c)) for v, c, f in zip(values, cbar, fbar)]
