"""Similarity from the area under a KL divergence frontier.

Pooled samples are projected onto principal components, jointly quantized
by k-means, and the resulting histograms P and Q are compared through
mixtures R_w = w*P + (1-w)*Q: each mixture weight contributes the frontier
point (exp(-c KL(Q||R_w)), exp(-c KL(P||R_w))). The score is the area
under that frontier, which is 1 when P = Q and tends to 0 for disjoint
supports.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid

from ..errors import MetricError
from ..types import EmbeddingMatrix
from .base import Direction, Metric, MetricValue, paired_samples
from .kmeans import pooled_histograms

DEFAULT_PCA_DIMS = 16
DEFAULT_SCALE_C = 5.0
DEFAULT_WEIGHT_GRID = 101
SMOOTHING_EPS = 1e-6
MAX_CLUSTERS = 50


def default_cluster_count(pooled_n: int) -> int:
    """2 * sqrt(pooled sample count), capped at 50 and floored at 2."""
    return max(2, min(MAX_CLUSTERS, int(round(2.0 * np.sqrt(pooled_n)))))


def pca_project(pooled: np.ndarray, pca_dims: int) -> np.ndarray:
    centered = pooled - pooled.mean(axis=0)
    if not centered.any():
        raise MetricError(
            "degenerate covariance: all pooled points are identical, "
            "cannot build a quantized low-dimensional space"
        )
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:pca_dims]
    # fix component signs for reproducibility across platforms
    signs = np.sign(comps[np.arange(len(comps)), np.abs(comps).argmax(axis=1)])
    signs[signs == 0] = 1.0
    return centered @ (comps * signs[:, None]).T


def _smooth(h: np.ndarray) -> np.ndarray:
    h = h + SMOOTHING_EPS
    return h / h.sum()


def _kl(a: np.ndarray, b: np.ndarray) -> float:
    mask = a > 0
    return float((a[mask] * np.log(a[mask] / b[mask])).sum())


def divergence_frontier(
    p: np.ndarray,
    q: np.ndarray,
    scale_c: float = DEFAULT_SCALE_C,
    weight_grid: int = DEFAULT_WEIGHT_GRID,
) -> tuple[np.ndarray, np.ndarray]:
    """Frontier points (exp(-c KL(Q||R_w)), exp(-c KL(P||R_w))) over w in (0,1).

    The exact endpoints (1, 0) and (0, 1) are appended so the curve always
    spans x in [0, 1].
    """
    if scale_c <= 0:
        raise MetricError(f"scale factor must be positive, got {scale_c}")
    p = _smooth(np.asarray(p, dtype=np.float64))
    q = _smooth(np.asarray(q, dtype=np.float64))
    weights = np.linspace(0.0, 1.0, weight_grid + 2)[1:-1]
    xs = [1.0]
    ys = [0.0]
    for w in weights:
        r = w * p + (1.0 - w) * q
        xs.append(np.exp(-scale_c * _kl(q, r)))
        ys.append(np.exp(-scale_c * _kl(p, r)))
    xs.append(0.0)
    ys.append(1.0)
    return np.array(xs), np.array(ys)


def frontier_area(xs: np.ndarray, ys: np.ndarray) -> float:
    order = np.argsort(xs, kind="stable")
    area = float(trapezoid(ys[order], xs[order]))
    return min(max(area, 0.0), 1.0)


def mauve(
    x: EmbeddingMatrix | np.ndarray,
    y: EmbeddingMatrix | np.ndarray,
    clusters: int | None = None,
    pca_dims: int = DEFAULT_PCA_DIMS,
    scale_c: float = DEFAULT_SCALE_C,
    seed: int = 0,
    weight_grid: int = DEFAULT_WEIGHT_GRID,
) -> MetricValue:
    """Area under the divergence frontier of the two embedding samples."""
    xa, ya = paired_samples(x, y)
    pooled_n = xa.shape[0] + ya.shape[0]
    if clusters is None:
        clusters = default_cluster_count(pooled_n)
    if clusters < 2:
        raise MetricError(f"need at least 2 clusters, got {clusters}")
    if pooled_n < clusters:
        raise MetricError(f"{pooled_n} pooled samples are too few for {clusters} clusters")
    dims = min(pca_dims, xa.shape[1])
    if dims < 1:
        raise MetricError(f"pca dims must be >= 1, got {pca_dims}")

    pooled = pca_project(np.vstack([xa, ya]), dims)
    p, q = pooled_histograms(pooled[: xa.shape[0]], pooled[xa.shape[0]:], clusters, seed=seed)
    xs, ys = divergence_frontier(p, q, scale_c=scale_c, weight_grid=weight_grid)
    return MetricValue(Metric.MAUVE, frontier_area(xs, ys), Direction.SIMILARITY)
