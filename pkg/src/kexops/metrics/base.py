"""Shared metric value/kernel types and input validation helpers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import MetricError
from ..types import EmbeddingMatrix, as_matrix


class Metric(str, Enum):
    MMD = "mmd"
    FBD = "fbd"
    PR_F1 = "pr"
    MAUVE = "mauve"


class Direction(str, Enum):
    # DISTANCE: lower means more similar. SIMILARITY: higher means more similar.
    DISTANCE = "distance"
    SIMILARITY = "similarity"


METRIC_DIRECTION = {
    Metric.MMD: Direction.DISTANCE,
    Metric.FBD: Direction.DISTANCE,
    Metric.PR_F1: Direction.SIMILARITY,
    Metric.MAUVE: Direction.SIMILARITY,
}


@dataclass(frozen=True)
class MetricValue:
    metric: Metric
    value: float
    direction: Direction

    def __post_init__(self) -> None:
        if self.direction is Direction.DISTANCE and self.value < 0:
            raise MetricError(f"{self.metric.value}: distance {self.value} is negative")
        if self.direction is Direction.SIMILARITY and not 0.0 <= self.value <= 1.0:
            raise MetricError(f"{self.metric.value}: similarity {self.value} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "metric": self.metric.value,
            "value": self.value,
            "direction": self.direction.value,
        }


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian kernel bandwidths used by the MMD estimator."""

    bandwidths: tuple[float, ...]

    def __post_init__(self) -> None:
        bws = tuple(float(b) for b in self.bandwidths)
        if not bws:
            raise MetricError("kernel spec needs at least one bandwidth")
        if any(b <= 0 for b in bws):
            raise MetricError(f"bandwidths must be positive, got {bws}")
        object.__setattr__(self, "bandwidths", bws)


def paired_samples(
    x: EmbeddingMatrix | np.ndarray, y: EmbeddingMatrix | np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Validate a two-sample pair: non-empty, equal dimensionality."""
    try:
        xa, ya = as_matrix(x), as_matrix(y)
    except ValueError as exc:
        raise MetricError(str(exc)) from exc
    if xa.shape[1] != ya.shape[1]:
        raise MetricError(f"dimension mismatch: {xa.shape[1]} vs {ya.shape[1]}")
    return xa, ya
