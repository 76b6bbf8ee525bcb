"""Matplotlib renderings of run artifacts, written next to the CSV/JSON output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 120


def save_history_figure(history, path) -> None:
    """Loss curves on top, clustering metrics below (when available)."""
    epochs = [r.epoch for r in history]
    has_metrics = any(r.acc is not None for r in history)
    fig, axes = plt.subplots(2 if has_metrics else 1, 1, figsize=(7, 6 if has_metrics else 3.5), sharex=True, squeeze=False)
    ax = axes[0][0]
    for key in ("af", "ap", "cr", "total"):
        ax.plot(epochs, [getattr(r, key) for r in history], label=key)
    ax.set_ylabel("loss")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    if has_metrics:
        ax2 = axes[1][0]
        for key in ("acc", "nmi", "ari"):
            ax2.plot(epochs, [getattr(r, key) for r in history], label=key)
        ax2.set_ylim(-0.05, 1.05)
        ax2.set_ylabel("score")
        ax2.legend(loc="best", fontsize=8)
        ax2.grid(alpha=0.3)
    axes[-1][0].set_xlabel("epoch")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_cluster_sizes_figure(sizes, path) -> None:
    sizes = np.asarray(sizes)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.bar(np.arange(len(sizes)), sizes)
    ax.set_xlabel("cluster")
    ax.set_ylabel("samples")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_embedding_figure(z, labels, path, title="assignment features (2-d projection)") -> None:
    """Scatter of the first two principal components, colored by label."""
    z = np.asarray(z, dtype=np.float64)
    centered = z - z.mean(axis=0)
    if z.shape[1] > 2:
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        coords = centered @ vt[:2].T
    elif z.shape[1] == 2:
        coords = centered
    else:
        coords = np.stack([centered[:, 0], np.zeros(len(z))], axis=1)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    sc = ax.scatter(coords[:, 0], coords[:, 1], c=np.asarray(labels), s=8, cmap="tab10", alpha=0.8)
    ax.set_title(title, fontsize=10)
    fig.colorbar(sc, ax=ax, label="cluster")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_sweep_figure(rows, param, path) -> None:
    """Mean metrics as a function of the swept parameter value."""
    values = [r["value"] for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    for key in ("mean_acc", "mean_nmi", "mean_ari"):
        if any(r[key] is not None for r in rows):
            ax.plot(values, [r[key] for r in rows], marker="o", label=key)
    ax.set_xlabel(param)
    ax.set_ylabel("score")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_bound_figure(mi_values, bounds, path) -> None:
    """Exact MI against the contrastive bound, with the y=x diagonal for reference."""
    mi_values = np.asarray(mi_values)
    bounds = np.asarray(bounds)
    fig, ax = plt.subplots(figsize=(4.8, 4.4))
    ax.scatter(bounds, mi_values, s=10, alpha=0.6)
    lo = min(bounds.min(), mi_values.min())
    hi = max(bounds.max(), mi_values.max())
    ax.plot([lo, hi], [lo, hi], "k--", linewidth=1, label="MI = bound")
    ax.set_xlabel("contrastive bound")
    ax.set_ylabel("exact MI")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
