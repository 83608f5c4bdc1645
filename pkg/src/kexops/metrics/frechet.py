"""Frechet distance between Gaussian fits of two embedding samples.

    FD = ||mu_x - mu_y||^2 + Tr(S_x + S_y - 2 (S_x S_y)^(1/2))

with sample means and sample covariances (ddof=1). The matrix square root
is evaluated through the symmetric product sqrt(S_x)^T S_y sqrt(S_x), whose
eigenvalues are real; slightly negative eigenvalues (above -1e-8) are
clamped to zero, anything more negative raises.
"""

from __future__ import annotations

import numpy as np

from ..errors import MetricError
from ..types import EmbeddingMatrix
from .base import Direction, Metric, MetricValue, paired_samples

EIG_CLAMP_TOL = -1e-8


def _mean_and_cov(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mu = a.mean(axis=0)
    centered = a - mu
    cov = centered.T @ centered / (a.shape[0] - 1)
    return mu, cov


def _sqrt_psd(mat: np.ndarray, context: str) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + mat.T) / 2.0)
    scale = max(abs(vals[0]), abs(vals[-1]), 1.0)
    if vals.min() < EIG_CLAMP_TOL * scale:
        raise MetricError(
            f"{context}: eigenvalue {vals.min():.3e} too negative for a covariance"
        )
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def frechet_distance(
    x: EmbeddingMatrix | np.ndarray, y: EmbeddingMatrix | np.ndarray
) -> MetricValue:
    xa, ya = paired_samples(x, y)
    if xa.shape[0] < 2 or ya.shape[0] < 2:
        raise MetricError("frechet distance needs at least 2 rows per sample")

    mu_x, cov_x = _mean_and_cov(xa)
    mu_y, cov_y = _mean_and_cov(ya)

    sqrt_x = _sqrt_psd(cov_x, "frechet: sqrt of first covariance")
    inner = sqrt_x @ cov_y @ sqrt_x
    vals = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    scale = max(abs(vals[0]), abs(vals[-1]), 1.0)
    if vals.min() < EIG_CLAMP_TOL * scale:
        raise MetricError(f"frechet: cross-term eigenvalue {vals.min():.3e} too negative")
    trace_sqrt = np.sqrt(np.clip(vals, 0.0, None)).sum()

    mean_term = float(((mu_x - mu_y) ** 2).sum())
    trace_term = float(np.trace(cov_x) + np.trace(cov_y) - 2.0 * trace_sqrt)
    return MetricValue(Metric.FBD, max(mean_term + trace_term, 0.0), Direction.DISTANCE)
