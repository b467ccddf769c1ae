"""Figure rendering for experiment reports.

Renders the residual trace of the best grid point, ACC/NMI heatmaps over
the (alpha, beta) grid, and threshold-sweep curves into ``figures/``
inside the output directory, next to the csv artifacts.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _metric_grid(records, alpha_grid, beta_grid, key):
    grid = np.full((len(alpha_grid), len(beta_grid)), np.nan)
    index = {(a, b): (i, j) for i, a in enumerate(alpha_grid) for j, b in enumerate(beta_grid)}
    for r in records:
        if r.m is None and getattr(r, key) is not None:
            i, j = index[(r.alpha, r.beta)]
            grid[i, j] = getattr(r, key)
    return grid


def _plot_heatmap(path, grid, alpha_grid, beta_grid, title):
    fig, ax = plt.subplots(figsize=(1.2 * len(beta_grid) + 2, 1.0 * len(alpha_grid) + 1.5))
    im = ax.imshow(grid, cmap="viridis", vmin=0.0, vmax=1.0, aspect="auto")
    ax.set_xticks(range(len(beta_grid)), [f"{b:g}" for b in beta_grid], rotation=45)
    ax.set_yticks(range(len(alpha_grid)), [f"{a:g}" for a in alpha_grid])
    ax.set_xlabel("beta")
    ax.set_ylabel("alpha")
    ax.set_title(title)
    for i in range(grid.shape[0]):
        for j in range(grid.shape[1]):
            if np.isfinite(grid[i, j]):
                ax.text(j, i, f"{grid[i, j]:.2f}", ha="center", va="center",
                        color="white" if grid[i, j] < 0.6 else "black", fontsize=8)
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_trace(path, outcome):
    history = np.asarray(outcome.residual_history)
    fig, ax = plt.subplots(figsize=(6, 4))
    iters = np.arange(1, history.shape[0] + 1)
    ax.semilogy(iters, history[:, 0], label="max|C - Z|")
    ax.semilogy(iters, history[:, 1], label="max|C1 - 1|")
    if outcome.delta_history:
        deltas = np.asarray(outcome.delta_history)
        floor = np.finfo(float).tiny
        for col, name in enumerate(("dC", "dF", "dZ")):
            ax.semilogy(iters, np.maximum(deltas[:, col], floor), "--", alpha=0.6, label=name)
    ax.set_xlabel("iteration")
    ax.set_ylabel("residual")
    ax.set_title(f"alpha={outcome.alpha:g}, beta={outcome.beta:g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_threshold_sweep(path, records, m_grid):
    best_acc, best_nmi = [], []
    for m in m_grid:
        rows = [r for r in records if r.m == m and r.acc is not None]
        best_acc.append(max((r.acc for r in rows), default=np.nan))
        best_nmi.append(max((r.nmi for r in rows), default=np.nan))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(m_grid, best_acc, "o-", label="ACC")
    ax.plot(m_grid, best_nmi, "s-", label="NMI")
    ax.set_xlabel("threshold m")
    ax.set_ylabel("best metric over (alpha, beta)")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("thresholded variant vs m")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_figures(out_dir, config, records, outcomes) -> list[Path]:
    """Render report figures; returns the paths written."""
    figures = Path(out_dir) / "figures"
    figures.mkdir(exist_ok=True)
    written = []

    succeeded = [o for o in outcomes if o.error is None and o.residual_history]
    if succeeded:
        by_acc = [(o.records[0].acc, o.index, o) for o in succeeded]
        scored = [t for t in by_acc if t[0] is not None]
        pick = max(scored, key=lambda t: (t[0], -t[1]))[2] if scored else succeeded[0]
        path = figures / "residuals.png"
        _plot_trace(path, pick)
        written.append(path)

    labeled = any(r.acc is not None for r in records)
    if labeled:
        for key in ("acc", "nmi"):
            grid = _metric_grid(records, config.alpha_grid, config.beta_grid, key)
            if np.isfinite(grid).any():
                path = figures / f"{key}_heatmap.png"
                _plot_heatmap(path, grid, config.alpha_grid, config.beta_grid, key.upper())
                written.append(path)
        if config.m_grid:
            path = figures / "threshold_sweep.png"
            _plot_threshold_sweep(path, records, config.m_grid)
            written.append(path)
    return written
