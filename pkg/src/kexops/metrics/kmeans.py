"""Deterministic k-means used for histogram quantization.

Seeded k-means++ initialization, Lloyd iterations capped at 100, stop on a
relative inertia improvement below 1e-4. Nearest-centroid ties go to the
lowest centroid index and empty clusters keep their previous centroid, so
identical inputs and seed always produce identical assignments.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import MetricError


def kmeans_assign(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-4,
) -> tuple[np.ndarray, np.ndarray]:
    """Cluster ``points`` into ``k`` cells; return (labels, centroids)."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k < 2:
        raise MetricError(f"need at least 2 clusters, got {k}")
    if n < k:
        raise MetricError(f"{n} samples are too few for {k} clusters")

    rng = np.random.default_rng(seed)
    centroids = _plus_plus_init(points, k, rng)

    prev_inertia = np.inf
    labels = np.zeros(n, dtype=np.intp)
    for _ in range(max_iter):
        dist2 = cdist(points, centroids, "sqeuclidean")
        labels = dist2.argmin(axis=1)  # argmin breaks ties by lowest index
        inertia = float(dist2[np.arange(n), labels].sum())
        for j in range(k):
            members = points[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
        if inertia == 0.0 or prev_inertia - inertia <= tol * prev_inertia:
            break
        prev_inertia = inertia
    return labels, centroids


def _plus_plus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    centroids[0] = points[rng.integers(n)]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            # all remaining points coincide with chosen centroids
            idx = rng.integers(n)
        centroids[i] = points[idx]
        d2 = np.minimum(d2, ((points - centroids[i]) ** 2).sum(axis=1))
    return centroids


def pooled_histograms(
    x: np.ndarray, y: np.ndarray, clusters: int, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Quantize the pooled samples and return the two cell-frequency histograms.

    Both sample sets are clustered jointly so the histograms share support.
    """
    pooled = np.vstack([x, y])
    labels, _ = kmeans_assign(pooled, clusters, seed=seed)
    p = np.bincount(labels[: len(x)], minlength=clusters).astype(np.float64)
    q = np.bincount(labels[len(x):], minlength=clusters).astype(np.float64)
    return p / p.sum(), q / q.sum()
