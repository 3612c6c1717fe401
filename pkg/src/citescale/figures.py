"""Static PNG renderings of the pipeline outputs (optional report layer)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "render_loss_histogram",
    "render_b_histogram",
    "render_gini_histogram",
    "render_scaling_map",
]

_DPI = 150


def _step_centers(edges: np.ndarray) -> np.ndarray:
    return (edges[:-1] + edges[1:]) / 2.0


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_loss_histogram(edges, counts, cutoff: float, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.stairs(counts, edges, fill=True, alpha=0.6)
    ax.axvline(cutoff, linestyle="--", linewidth=1.0, label=f"cutoff {cutoff:g}")
    ax.set_xscale("log")
    if np.any(np.asarray(counts) > 0):
        ax.set_yscale("log")
    ax.set_xlabel("minimum fit loss $s_{min}$")
    ax.set_ylabel("researchers per bin")
    ax.legend(frameon=False)
    _save(fig, path)


def render_b_histogram(edges, counts, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.stairs(counts, edges, fill=True, alpha=0.6)
    ax.set_xscale("log")
    if np.any(np.asarray(counts) > 0):
        ax.set_yscale("log")
    ax.set_xlabel("fitted shape exponent $b$")
    ax.set_ylabel("researchers per bin")
    _save(fig, path)


def render_gini_histogram(edges, counts, path: str) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.stairs(counts, edges, fill=True, alpha=0.6)
    ax.set_xlabel("Gini index of the citation record")
    ax.set_ylabel("researchers per bin")
    _save(fig, path)


def render_scaling_map(grid_x_edges, grid_y_edges, grid_counts,
                       curves: list[tuple[str, np.ndarray, np.ndarray]],
                       path: str) -> None:
    """Density map of (h/N_pub, sqrt(N_cit)/N_pub) with overlay curves."""
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    counts = np.asarray(grid_counts, dtype=float).T
    masked = np.ma.masked_equal(counts, 0.0)
    mesh = ax.pcolormesh(grid_x_edges, grid_y_edges, masked, cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="researchers per cell")
    for label, xs, ys in curves:
        keep = np.isfinite(ys) & (ys <= grid_y_edges[-1] * 1.05)
        ax.plot(np.asarray(xs)[keep], np.asarray(ys)[keep], linewidth=1.2, label=label)
    ax.set_xlim(grid_x_edges[0], grid_x_edges[-1])
    ax.set_ylim(grid_y_edges[0], grid_y_edges[-1])
    ax.set_xlabel("$h / N_{pub}$")
    ax.set_ylabel("$\\sqrt{N_{cit}} / N_{pub}$")
    ax.legend(frameon=False, fontsize=8)
    _save(fig, path)
