"""Distributional similarity metrics between embedding matrices."""

from .base import Direction, KernelSpec, Metric, MetricValue, METRIC_DIRECTION
from .frechet import frechet_distance
from .kmeans import kmeans_assign, pooled_histograms
from .mauve import divergence_frontier, frontier_area, mauve
from .mmd import median_heuristic_bandwidths, mmd_squared
from .prd import max_f1, pr_f1, prd_curve, prd_max_f1
from .sampling import SamplingPlan, subsampled_metric

__all__ = [
    "Direction",
    "KernelSpec",
    "Metric",
    "MetricValue",
    "METRIC_DIRECTION",
    "SamplingPlan",
    "divergence_frontier",
    "frechet_distance",
    "frontier_area",
    "kmeans_assign",
    "max_f1",
    "mauve",
    "median_heuristic_bandwidths",
    "mmd_squared",
    "pooled_histograms",
    "pr_f1",
    "prd_curve",
    "prd_max_f1",
    "subsampled_metric",
    "compute_metric",
]


def compute_metric(
    metric: Metric,
    x,
    y,
    seed: int = 0,
    clusters: int | None = None,
) -> MetricValue:
    """Evaluate one named metric with its default configuration."""
    metric = Metric(metric)
    if metric is Metric.MMD:
        return mmd_squared(x, y, median_heuristic_bandwidths(x, y, seed=seed))
    if metric is Metric.FBD:
        return frechet_distance(x, y)
    if metric is Metric.PR_F1:
        kwargs = {} if clusters is None else {"clusters": clusters}
        return pr_f1(x, y, seed=seed, **kwargs)
    if metric is Metric.MAUVE:
        return mauve(x, y, clusters=clusters, seed=seed)
    raise ValueError(f"unknown metric {metric}")
