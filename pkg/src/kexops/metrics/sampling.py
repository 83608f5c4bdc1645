"""Subsampled metric evaluation.

Large corpora are compared by drawing fixed-size row subsets from each
matrix, evaluating the metric on the subsets, and averaging over repeats.
Each repeat uses an independent child of the plan seed, so results are
reproducible and repeats are statistically distinct.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import MetricError
from ..types import EmbeddingMatrix
from .base import MetricValue

DEFAULT_SAMPLE_SIZE = 1000
DEFAULT_REPEATS = 10


@dataclass(frozen=True)
class SamplingPlan:
    sample_size: int = DEFAULT_SAMPLE_SIZE
    repeats: int = DEFAULT_REPEATS
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sample_size < 2:
            raise MetricError(f"sample_size must be >= 2, got {self.sample_size}")
        if self.repeats < 1:
            raise MetricError(f"repeats must be >= 1, got {self.repeats}")


def _draw(rng: np.random.Generator, n_rows: int, sample_size: int) -> np.ndarray:
    if sample_size >= n_rows:
        return np.arange(n_rows)
    return np.sort(rng.choice(n_rows, size=sample_size, replace=False))


def subsampled_metric(
    metric_op: Callable[[EmbeddingMatrix, EmbeddingMatrix], MetricValue],
    x: EmbeddingMatrix,
    y: EmbeddingMatrix,
    plan: SamplingPlan,
) -> MetricValue:
    """Average ``metric_op`` over seeded row subsamples of ``x`` and ``y``.

    Rows are drawn uniformly without replacement; a matrix smaller than the
    sample size contributes all of its rows. With repeats=1 and a sample
    size covering both matrices this reduces to the plain metric.
    """
    children = np.random.SeedSequence(plan.seed).spawn(plan.repeats)
    values = []
    result: MetricValue | None = None
    for child in children:
        rng = np.random.default_rng(child)
        ix = _draw(rng, x.n_rows, plan.sample_size)
        iy = _draw(rng, y.n_rows, plan.sample_size)
        result = metric_op(x.take_rows(ix), y.take_rows(iy))
        values.append(result.value)
    assert result is not None
    return MetricValue(result.metric, float(np.mean(values)), result.direction)
