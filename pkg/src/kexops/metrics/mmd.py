"""Maximum mean discrepancy between two embedding samples.

Uses the biased V-statistic with Gaussian kernels
kappa(x, y) = exp(-||x - y||^2 / (2 sigma^2)), averaged over a set of
bandwidths. Bandwidths default to the median pairwise distance scaled by
{0.25, 0.5, 1, 2, 4}.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist, pdist

from ..errors import MetricError
from ..types import EmbeddingMatrix
from .base import Direction, KernelSpec, Metric, MetricValue, paired_samples

DEFAULT_MULTIPLIERS = (0.25, 0.5, 1.0, 2.0, 4.0)


def mmd_squared(
    x: EmbeddingMatrix | np.ndarray,
    y: EmbeddingMatrix | np.ndarray,
    kernel: KernelSpec,
) -> MetricValue:
    """Squared MMD between the sample sets, averaged over kernel bandwidths.

    For samples x_1..x_m and y_1..y_n the per-bandwidth estimate is

        (1/m^2) sum_ij k(x_i, x_j) - (2/mn) sum_ij k(x_i, y_j)
        + (1/n^2) sum_ij k(y_i, y_j)

    which is non-negative up to float residue; tiny negatives are clamped.
    """
    xa, ya = paired_samples(x, y)
    m, n = xa.shape[0], ya.shape[0]
    # Sorting the squared distances fixes the summation order, making the
    # estimate exactly invariant under row permutations of either sample.
    dxx = np.sort(cdist(xa, xa, "sqeuclidean"), axis=None)
    dxy = np.sort(cdist(xa, ya, "sqeuclidean"), axis=None)
    dyy = np.sort(cdist(ya, ya, "sqeuclidean"), axis=None)

    total = 0.0
    for sigma in kernel.bandwidths:
        gamma = 1.0 / (2.0 * sigma * sigma)
        kxx = np.exp(-gamma * dxx).sum() / (m * m)
        kxy = np.exp(-gamma * dxy).sum() / (m * n)
        kyy = np.exp(-gamma * dyy).sum() / (n * n)
        total += kxx - 2.0 * kxy + kyy
    value = max(total / len(kernel.bandwidths), 0.0)
    return MetricValue(Metric.MMD, value, Direction.DISTANCE)


def median_heuristic_bandwidths(
    x: EmbeddingMatrix | np.ndarray,
    y: EmbeddingMatrix | np.ndarray,
    multipliers: tuple[float, ...] = DEFAULT_MULTIPLIERS,
    cap: int = 1000,
    seed: int = 0,
) -> KernelSpec:
    """Median pairwise distance of the pooled samples, scaled by multipliers.

    The pool is subsampled to at most ``cap`` points (seeded) before the
    O(n^2) median; a zero median falls back to sigma = 1.
    """
    xa, ya = paired_samples(x, y)
    pooled = np.vstack([xa, ya])
    if pooled.shape[0] < 2:
        raise MetricError("median heuristic needs at least 2 pooled points")
    if pooled.shape[0] > cap:
        rng = np.random.default_rng(seed)
        pooled = pooled[np.sort(rng.choice(pooled.shape[0], cap, replace=False))]
    sigma0 = float(np.median(pdist(pooled)))
    if sigma0 == 0.0:
        sigma0 = 1.0
    return KernelSpec(tuple(sigma0 * m for m in multipliers))
