"""Clustering evaluation: accuracy under optimal matching, NMI, ARI, variance stats."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ShapeError


def hungarian(cost: np.ndarray) -> np.ndarray:
    """Permutation p minimizing sum_i cost[i, p[i]] for a square cost matrix.

    Backed by the Jonker-Volgenant solver in scipy; tests cross-check it
    against exhaustive permutation search.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ShapeError(f"hungarian: cost matrix must be square, got {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise ShapeError("hungarian: cost matrix must be finite")
    _, cols = linear_sum_assignment(cost)
    return cols


def contingency(pred, truth, k: int) -> np.ndarray:
    pred, truth = _check_labels(pred, truth, k)
    table = np.zeros((k, k), dtype=np.int64)
    np.add.at(table, (pred, truth), 1)
    return table


def acc(pred, truth, k: int) -> float:
    """Fraction correct under the best one-to-one cluster-to-class mapping."""
    table = contingency(pred, truth, k)
    perm = hungarian(-table.astype(np.float64))
    return float(table[np.arange(k), perm].sum() / table.sum())


def nmi(pred, truth) -> float:
    """I(pred; truth) / sqrt(H(pred) H(truth)), natural logs, 0 log 0 := 0.

    Returns 0 when either partition has zero entropy (0/0 convention).
    """
    pred, truth = _check_labels(pred, truth)
    n = len(pred)
    k = int(max(pred.max(), truth.max())) + 1
    joint = contingency(pred, truth, k) / n
    pi = joint.sum(axis=1)
    pj = joint.sum(axis=0)
    mask = joint > 0
    mi = float(np.sum(joint[mask] * np.log(joint[mask] / np.outer(pi, pj)[mask])))
    h_pred = _entropy(pi)
    h_true = _entropy(pj)
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    return mi / np.sqrt(h_pred * h_true)


def ari(pred, truth) -> float:
    """Adjusted Rand index from pair counts; 0/0 := 0."""
    pred, truth = _check_labels(pred, truth)
    k = int(max(pred.max(), truth.max())) + 1
    table = contingency(pred, truth, k)
    n = int(table.sum())
    index = _comb2(table).sum()
    sum_a = _comb2(table.sum(axis=1)).sum()
    sum_b = _comb2(table.sum(axis=0)).sum()
    total = _comb2(np.array([n]))[0]
    expected = sum_a * sum_b / total if total else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 0.0
    return float((index - expected) / (max_index - expected))


def cluster_sizes(pred, k: int) -> np.ndarray:
    pred = np.asarray(pred, dtype=np.int64)
    return np.bincount(pred, minlength=k)


def variance_report(p, truth) -> tuple[list[float], float]:
    """Per-class intra variance and overall inter variance of assignment rows.

    Intra: mean squared distance of each class's rows to the class centroid.
    Inter: mean squared distance of class centroids to their common mean.
    Classes absent from ``truth`` are skipped.
    """
    p = np.asarray(p, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.int64)
    if p.ndim != 2 or p.shape[0] != len(truth):
        raise ShapeError(f"variance_report: p shape {p.shape} vs {len(truth)} labels")
    classes = np.unique(truth)
    centroids = []
    intra = []
    for c in classes:
        rows = p[truth == c]
        centroid = rows.mean(axis=0)
        centroids.append(centroid)
        intra.append(float(np.mean(np.sum((rows - centroid) ** 2, axis=1))))
    centroids = np.asarray(centroids)
    global_centroid = centroids.mean(axis=0)
    inter = float(np.mean(np.sum((centroids - global_centroid) ** 2, axis=1)))
    return intra, inter


def _entropy(dist: np.ndarray) -> float:
    mask = dist > 0
    return float(-np.sum(dist[mask] * np.log(dist[mask])))


def _comb2(counts: np.ndarray) -> np.ndarray:
    counts = counts.astype(np.float64)
    return counts * (counts - 1.0) / 2.0


def _check_labels(pred, truth, k: int | None = None):
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ShapeError(f"label vectors must be 1-d and equal length, got {pred.shape} vs {truth.shape}")
    if pred.size == 0:
        raise ShapeError("label vectors must be nonempty")
    if pred.min() < 0 or truth.min() < 0:
        raise ShapeError("labels must be nonnegative")
    if k is not None and (pred.max() >= k or truth.max() >= k):
        raise ShapeError(f"labels must lie in [0, {k}), got max {max(pred.max(), truth.max())}")
    return pred, truth
