"""Historical-model recommendation from dataset similarity rankings.

The nearest candidate dataset (by fused similarity) supplies its
best-performing model for the desired metric. Accuracy of the whole
procedure is measured leave-self-out: for every dataset, recommend via the
other datasets and compare against the dataset's own best model.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import NoRecommendationError
from .metrics import Metric, SamplingPlan
from .ranking import (
    MetricSource,
    SimilarityReport,
    embedding_metric_source,
    rank_candidates,
    table_metric_source,
)
from .registry import Registry
from .types import METRIC_NAMES, ExperimentRecord

log = logging.getLogger(__name__)

DESIRED_METRICS = METRIC_NAMES  # precision, recall, f1


@dataclass
class Recommendation:
    target_dataset_id: str
    neighbor_dataset_id: str
    desired_metric: str
    model_id: str
    neighbor_metric_value: float
    provenance: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "target_dataset_id": self.target_dataset_id,
            "neighbor_dataset_id": self.neighbor_dataset_id,
            "desired_metric": self.desired_metric,
            "model_id": self.model_id,
            "neighbor_metric_value": self.neighbor_metric_value,
            "provenance": list(self.provenance),
        }


def best_model(experiments: Iterable[ExperimentRecord], desired_metric: str) -> tuple[str, float]:
    """Argmax of the desired metric over completed experiments; ties go to
    the lexicographically smallest model id."""
    best: tuple[float, str] | None = None
    for exp in experiments:
        assert exp.metrics is not None
        value = exp.metrics[desired_metric]
        if best is None or value > best[0] or (value == best[0] and exp.model_id < best[1]):
            best = (value, exp.model_id)
    if best is None:
        raise NoRecommendationError("no completed experiments")
    return best[1], best[0]


def recommend(
    registry: Registry,
    desired_metric: str,
    report: SimilarityReport,
) -> Recommendation:
    """Recommend the best model from the most similar dataset with history.

    Candidates without completed experiments are skipped in final-order
    sequence; if none has history the recommendation fails explicitly.
    """
    if desired_metric not in DESIRED_METRICS:
        raise NoRecommendationError(
            f"desired metric must be one of {DESIRED_METRICS}, got {desired_metric!r}"
        )
    if not report.final_order:
        raise NoRecommendationError(f"empty similarity ranking for {report.target_dataset_id!r}")
    for neighbor in report.final_order:
        completed = registry.completed_experiments(neighbor)
        if not completed:
            log.warning(
                "candidate %s has no completed experiments; trying next-nearest", neighbor
            )
            continue
        model_id, value = best_model(completed, desired_metric)
        return Recommendation(
            target_dataset_id=report.target_dataset_id,
            neighbor_dataset_id=neighbor,
            desired_metric=desired_metric,
            model_id=model_id,
            neighbor_metric_value=value,
            provenance=sorted(e.id for e in completed),
        )
    raise NoRecommendationError(
        f"no candidate of {report.target_dataset_id!r} has completed experiments"
    )


@dataclass
class AccuracyReport:
    matches: int
    total: int
    per_metric: dict[str, float]
    per_target: dict[str, dict[str, dict]]
    excluded: list[str] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.matches / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "matches": self.matches,
            "total": self.total,
            "per_metric": dict(self.per_metric),
            "per_target": self.per_target,
            "excluded": list(self.excluded),
        }


def evaluate_accuracy(
    registry: Registry,
    source: MetricSource,
    desired_metrics: Iterable[str] = DESIRED_METRICS,
    metrics: Iterable[Metric] = (Metric.MMD,),
    weights: Mapping[Metric, float] | None = None,
) -> AccuracyReport:
    """Leave-self-out recommendation accuracy over all registered datasets.

    A hit is counted per (dataset, desired metric) pair when the recommended
    model equals the dataset's own argmax; datasets without completed
    experiments have no defined gold and are excluded with a warning.
    """
    desired_metrics = list(desired_metrics)
    dataset_ids = [d.id for d in registry.list_datasets()]
    eligible, excluded = [], []
    for ds in dataset_ids:
        if registry.completed_experiments(ds):
            eligible.append(ds)
        else:
            excluded.append(ds)
            log.warning("excluding dataset %s: no completed experiments define a gold", ds)

    matches = 0
    per_metric_hits = {m: 0 for m in desired_metrics}
    per_target: dict[str, dict[str, dict]] = {}
    for target in eligible:
        candidates = [c for c in eligible if c != target]
        report = rank_candidates(target, candidates, metrics, source, weights)
        per_target[target] = {}
        for dm in desired_metrics:
            rec = recommend(registry, dm, report)
            gold_model, gold_value = best_model(registry.completed_experiments(target), dm)
            hit = rec.model_id == gold_model
            matches += hit
            per_metric_hits[dm] += hit
            per_target[target][dm] = {
                "neighbor": rec.neighbor_dataset_id,
                "recommended": rec.model_id,
                "gold": gold_model,
                "gold_value": gold_value,
                "hit": hit,
            }

    total = len(eligible) * len(desired_metrics)
    per_metric = {
        m: (per_metric_hits[m] / len(eligible) if eligible else 0.0) for m in desired_metrics
    }
    return AccuracyReport(matches, total, per_metric, per_target, excluded)


# -- bundled benchmark fixture ---------------------------------------------------

FIXTURE_TABLES = "paper_tables.json"
FIXTURE_RESULTS = "benchmark_results.json"


def load_fixture_tables(path: str | Path | None = None) -> dict:
    """Load pairwise metric tables: {metric -> {target -> {candidate -> value}}}.

    With no path, the bundled seven-dataset benchmark table ships with the
    package.
    """
    if path is not None:
        return json.loads(Path(path).read_text())
    return json.loads(resources.files("kexops.data").joinpath(FIXTURE_TABLES).read_text())


def load_fixture_results() -> dict:
    """Bundled benchmark outcomes: {dataset -> {model -> {precision, recall, f1}}}."""
    return json.loads(resources.files("kexops.data").joinpath(FIXTURE_RESULTS).read_text())


def seed_fixture_registry(registry: Registry) -> None:
    """Populate a registry with the bundled benchmark datasets, models, and
    completed experiments, for offline demos and tests."""
    from .types import DatasetRecord, ExperimentStatus, ModelRecord, Task

    results = load_fixture_results()
    model_ids = sorted({m for models in results.values() for m in models})
    for ds in sorted(results):
        registry.put_dataset(DatasetRecord(id=ds, name=ds, task=Task.NER, domain="general"))
    for mid in model_ids:
        registry.put_model(ModelRecord(id=mid, name=mid, task=Task.NER))
    for ds in sorted(results):
        for mid in sorted(results[ds]):
            rec = ExperimentRecord(
                id=f"{ds}-{mid}",
                dataset_id=ds,
                model_id=mid,
                hyperparams={},
                status=ExperimentStatus.COMPLETED,
                metrics=results[ds][mid],
            )
            registry.put_experiment(rec)


def fixture_source(path: str | Path | None = None) -> MetricSource:
    return table_metric_source(load_fixture_tables(path))


def registry_embedding_source(registry: Registry, plan: SamplingPlan) -> MetricSource:
    """Metric source reading each dataset's EMB1 file referenced in the registry."""
    from .emb1 import read_embedding
    from .errors import MetricError

    def load(dataset_id: str):
        rec = registry.get_dataset(dataset_id)
        if not rec.embedding_ref:
            raise MetricError(f"dataset {dataset_id!r} has no embedding")
        return read_embedding(rec.embedding_ref)

    return embedding_metric_source(load, plan)
