"""Precision-recall decomposition of the gap between two sample sets.

The pooled samples are quantized by k-means into shared cells, giving two
cell-frequency histograms P (first sample) and Q (second sample). The PRD
curve is traced over slopes lambda = tan(theta) for theta on a uniform grid
in (0, pi/2):

    alpha(lambda) = sum_i min(lambda * P_i, Q_i)      # precision
    beta(lambda)  = alpha(lambda) / lambda            # recall

and the final measurement is the maximum F1 = 2ab/(a+b) along the curve.
"""

from __future__ import annotations

import numpy as np

from ..errors import MetricError
from ..types import EmbeddingMatrix
from .base import Direction, Metric, MetricValue, paired_samples
from .kmeans import pooled_histograms

DEFAULT_CLUSTERS = 20
DEFAULT_ANGLES = 1001
_ANGLE_EPSILON = 1e-10


def prd_curve(
    p: np.ndarray, q: np.ndarray, num_angles: int = DEFAULT_ANGLES
) -> tuple[np.ndarray, np.ndarray]:
    """PRD curve (precision, recall) for two discrete distributions."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise MetricError(f"histogram shapes differ: {p.shape} vs {q.shape}")
    if num_angles < 3:
        raise MetricError("need at least 3 angles for the PRD curve")
    angles = np.linspace(_ANGLE_EPSILON, np.pi / 2 - _ANGLE_EPSILON, num_angles)
    slopes = np.tan(angles)
    precision = np.minimum(slopes[:, None] * p[None, :], q[None, :]).sum(axis=1)
    recall = precision / slopes
    return np.clip(precision, 0.0, 1.0), np.clip(recall, 0.0, 1.0)


def max_f1(precision: np.ndarray, recall: np.ndarray) -> float:
    """Maximum harmonic mean over paired precision/recall values."""
    pr_sum = precision + recall
    with np.errstate(invalid="ignore", divide="ignore"):
        f1 = np.where(pr_sum > 0, 2.0 * precision * recall / pr_sum, 0.0)
    return float(np.clip(f1.max(), 0.0, 1.0))


def prd_max_f1(p: np.ndarray, q: np.ndarray, num_angles: int = DEFAULT_ANGLES) -> float:
    precision, recall = prd_curve(p, q, num_angles)
    return max_f1(precision, recall)


def pr_f1(
    x: EmbeddingMatrix | np.ndarray,
    y: EmbeddingMatrix | np.ndarray,
    clusters: int = DEFAULT_CLUSTERS,
    lambda_grid: int = DEFAULT_ANGLES,
    seed: int = 0,
) -> MetricValue:
    """Max-F1 summary of the PRD curve between two embedding samples."""
    xa, ya = paired_samples(x, y)
    if clusters < 2:
        raise MetricError(f"need at least 2 clusters, got {clusters}")
    if xa.shape[0] + ya.shape[0] < clusters:
        raise MetricError(
            f"{xa.shape[0]} + {ya.shape[0]} samples are too few for {clusters} clusters"
        )
    p, q = pooled_histograms(xa, ya, clusters, seed=seed)
    return MetricValue(Metric.PR_F1, prd_max_f1(p, q, lambda_grid), Direction.SIMILARITY)
