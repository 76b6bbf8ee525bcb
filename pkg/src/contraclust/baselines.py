"""Plain Lloyd k-means, used as the reference clustering baseline in tests and reports."""

from __future__ import annotations

import numpy as np


def lloyd_kmeans(x, k: int, iters: int = 10, seed: int = 0, restarts: int = 1) -> np.ndarray:
    """Labels from the best of ``restarts`` seeded Lloyd runs (lowest inertia)."""
    x = np.asarray(x, dtype=np.float64)
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = x[rng.choice(len(x), size=k, replace=False)]
        labels = np.zeros(len(x), dtype=np.int64)
        for _ in range(iters):
            d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            labels = d2.argmin(axis=1)
            for c in range(k):
                member = x[labels == c]
                if len(member):
                    centers[c] = member.mean(axis=0)
        inertia = float(((x - centers[labels]) ** 2).sum())
        if inertia < best_inertia:
            best_inertia, best_labels = inertia, labels
    return best_labels
