"""Rank-sum-ratio fusion of similarity metrics across candidate datasets.

Candidates are ranked per metric (rank 1 = most similar, fractional ranks
on ties), ranks are combined into a weighted rank sum, and each sum is
divided by the total over all candidates. The final ordering is ascending
by that ratio, so fusing several metrics cannot be distorted by any single
metric's scale.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from scipy.stats import rankdata

from .errors import KexopsError, MetricError
from .metrics import (
    Direction,
    Metric,
    MetricValue,
    SamplingPlan,
    compute_metric,
    subsampled_metric,
)

log = logging.getLogger(__name__)

ALL_METRICS = (Metric.MMD, Metric.FBD, Metric.PR_F1, Metric.MAUVE)


@dataclass
class CandidateRow:
    candidate_dataset_id: str
    metric_values: dict[Metric, MetricValue]
    metric_ranks: dict[Metric, float] = field(default_factory=dict)
    weighted_rank_sum: float = 0.0
    rank_sum_ratio: float = 0.0

    def to_dict(self) -> dict:
        return {
            "candidate_dataset_id": self.candidate_dataset_id,
            "metric_values": {m.value: v.to_dict() for m, v in self.metric_values.items()},
            "metric_ranks": {m.value: r for m, r in self.metric_ranks.items()},
            "weighted_rank_sum": self.weighted_rank_sum,
            "rank_sum_ratio": self.rank_sum_ratio,
        }


@dataclass
class SimilarityReport:
    target_dataset_id: str
    rows: list[CandidateRow]
    final_order: list[str]
    dropped: dict[str, str] = field(default_factory=dict)

    def row(self, candidate_id: str) -> CandidateRow:
        for r in self.rows:
            if r.candidate_dataset_id == candidate_id:
                return r
        raise KexopsError(f"no row for candidate {candidate_id!r}")

    def to_dict(self) -> dict:
        return {
            "target_dataset_id": self.target_dataset_id,
            "rows": [r.to_dict() for r in self.rows],
            "final_order": list(self.final_order),
            "dropped": dict(self.dropped),
        }


def normalize_weights(
    weights: Mapping[Metric, float] | None, metrics: Iterable[Metric]
) -> dict[Metric, float]:
    metrics = list(metrics)
    if weights is None:
        return {m: 1.0 for m in metrics}
    out = {m: float(weights.get(m, 0.0)) for m in metrics}
    if any(w < 0 for w in out.values()):
        raise KexopsError(f"metric weights must be non-negative, got {weights}")
    if not any(w > 0 for w in out.values()):
        raise KexopsError("at least one metric weight must be positive")
    return out


def fuse_rankings(
    target: str,
    metric_values: Mapping[str, Mapping[Metric, MetricValue]],
    weights: Mapping[Metric, float] | None = None,
) -> SimilarityReport:
    """Fuse per-candidate metric values into a ranked similarity report.

    ``metric_values`` maps candidate id -> metric -> MetricValue. Every
    candidate must carry the same metric set.
    """
    if not metric_values:
        raise KexopsError(f"no candidates to rank for target {target!r}")
    candidates = sorted(metric_values)
    metrics = sorted(metric_values[candidates[0]], key=lambda m: m.value)
    for cand in candidates:
        if sorted(metric_values[cand], key=lambda m: m.value) != metrics:
            raise KexopsError(f"candidate {cand!r} is missing metric values")
    weights = normalize_weights(weights, metrics)

    rows = {cand: CandidateRow(cand, dict(metric_values[cand])) for cand in candidates}
    for metric in metrics:
        values = [metric_values[c][metric].value for c in candidates]
        direction = metric_values[candidates[0]][metric].direction
        keyed = values if direction is Direction.DISTANCE else [-v for v in values]
        ranks = rankdata(keyed, method="average")
        for cand, rank in zip(candidates, ranks):
            rows[cand].metric_ranks[metric] = float(rank)

    for cand in candidates:
        rows[cand].weighted_rank_sum = sum(
            weights[m] * rows[cand].metric_ranks[m] for m in metrics
        )
    total = sum(rows[c].weighted_rank_sum for c in candidates)
    for cand in candidates:
        rows[cand].rank_sum_ratio = rows[cand].weighted_rank_sum / total

    def order_key(cand: str):
        mmd_rank = rows[cand].metric_ranks.get(Metric.MMD, 0.0)
        return (rows[cand].rank_sum_ratio, mmd_rank, cand)

    final = sorted(candidates, key=order_key)
    return SimilarityReport(target, [rows[c] for c in final], final)


MetricSource = Callable[[str, str, Metric], MetricValue]
"""(target_id, candidate_id, metric) -> MetricValue."""


def embedding_metric_source(
    load_embedding: Callable[[str], object],
    plan: SamplingPlan,
) -> MetricSource:
    """Metric source that computes subsampled metrics from stored embeddings."""

    def source(target: str, candidate: str, metric: Metric) -> MetricValue:
        x = load_embedding(target)
        y = load_embedding(candidate)
        op = lambda a, b: compute_metric(metric, a, b, seed=plan.seed)
        return subsampled_metric(op, x, y, plan)

    return source


def table_metric_source(table: Mapping[str, Mapping[str, Mapping[str, float]]]) -> MetricSource:
    """Metric source backed by precomputed pairwise tables.

    Table format: {metric -> {target_id -> {candidate_id -> value}}}.
    """
    from .metrics import METRIC_DIRECTION

    def source(target: str, candidate: str, metric: Metric) -> MetricValue:
        try:
            value = table[metric.value][target][candidate]
        except KeyError:
            raise MetricError(
                f"fixture table has no {metric.value} entry for ({target}, {candidate})"
            ) from None
        return MetricValue(metric, float(value), METRIC_DIRECTION[metric])

    return source


def rank_candidates(
    target: str,
    candidates: Iterable[str],
    metrics: Iterable[Metric],
    source: MetricSource,
    weights: Mapping[Metric, float] | None = None,
) -> SimilarityReport:
    """Compute metric values for every candidate and fuse them into a report.

    A candidate whose metric computation fails is dropped with a warning and
    recorded in the report, so one bad embedding cannot sink the ranking.
    """
    candidates = list(dict.fromkeys(candidates))
    metrics = [Metric(m) for m in metrics]
    if not candidates:
        raise KexopsError(f"no candidate datasets for target {target!r}")
    if not metrics:
        raise KexopsError("no metrics requested")

    values: dict[str, dict[Metric, MetricValue]] = {}
    dropped: dict[str, str] = {}
    for cand in candidates:
        try:
            values[cand] = {m: source(target, cand, m) for m in metrics}
        except KexopsError as exc:
            dropped[cand] = str(exc)
            log.warning("dropping candidate %s: %s", cand, exc)
    if not values:
        raise KexopsError(
            f"all candidates failed for target {target!r}: {sorted(dropped)}"
        )
    report = fuse_rankings(target, values, weights)
    report.dropped = dropped
    return report
