import csv

import pytest

from kexops.metrics import (
    Direction,
    Metric,
    MetricValue,
    SamplingPlan,
    compute_metric,
)
from kexops.ranking import fuse_rankings
from kexops.recommender import registry_embedding_source
from kexops.report import render_ranking_report, render_similarity_report
from kexops.types import EmbeddingMatrix

from conftest import make_dataset


def test_similarity_report_files(tmp_path, rng):
    x = EmbeddingMatrix(rng.normal(size=(60, 5)))
    y = EmbeddingMatrix(rng.normal(loc=1.0, size=(60, 5)))
    results = {
        m: compute_metric(m, x, y, seed=1)
        for m in (Metric.MMD, Metric.FBD, Metric.PR_F1, Metric.MAUVE)
    }
    written = render_similarity_report(tmp_path / "out", results, x, y, seed=1)
    names = {p.name for p in written}
    assert names == {
        "similarity.csv",
        "similarity_metrics.png",
        "prd_curve.png",
        "divergence_frontier.png",
    }
    with open(tmp_path / "out" / "similarity.csv") as fh:
        rows = {r["metric"]: r for r in csv.DictReader(fh)}
    assert set(rows) == {"mmd", "fbd", "pr", "mauve"}
    for metric, mv in results.items():
        assert float(rows[metric.value]["value"]) == pytest.approx(mv.value)
    for p in written:
        assert p.stat().st_size > 0


def test_similarity_report_without_curve_metrics(tmp_path, rng):
    x = EmbeddingMatrix(rng.normal(size=(30, 4)))
    results = {Metric.MMD: MetricValue(Metric.MMD, 0.2, Direction.DISTANCE)}
    written = render_similarity_report(tmp_path / "out", results, x, x)
    assert {p.name for p in written} == {"similarity.csv", "similarity_metrics.png"}


def test_ranking_report_files(tmp_path):
    values = {
        "near": {Metric.MMD: MetricValue(Metric.MMD, 0.1, Direction.DISTANCE)},
        "far": {Metric.MMD: MetricValue(Metric.MMD, 0.9, Direction.DISTANCE)},
    }
    report = fuse_rankings("target", values)
    written = render_ranking_report(tmp_path / "rank", report)
    assert {p.name for p in written} == {"ranking.csv", "rank_sum_ratio.png"}
    with open(tmp_path / "rank" / "ranking.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["candidate"] for r in rows] == ["near", "far"]
    assert float(rows[0]["rank_sum_ratio"]) < float(rows[1]["rank_sum_ratio"])


def test_computed_metric_source_end_to_end(registry, tmp_path, rng):
    """Recommendation pipeline over real EMB1 files instead of fixture tables."""
    from kexops.emb1 import write_embedding
    from kexops.ranking import rank_candidates

    base = rng.normal(size=(300, 6))
    specs = {
        "target": base[:100],
        "close": base[100:200] + 0.05,  # nearly the same distribution
        "distant": base[200:300] + 8.0,
    }
    for name, data in specs.items():
        path = tmp_path / f"{name}.emb1"
        write_embedding(EmbeddingMatrix(data), path)
        make_dataset(registry, name, embedding_ref=str(path))

    plan = SamplingPlan(sample_size=100, repeats=2, seed=5)
    source = registry_embedding_source(registry, plan)
    report = rank_candidates(
        "target", ["close", "distant"], list(Metric), source
    )
    assert report.final_order == ["close", "distant"]
    row = report.row("close")
    assert row.metric_values[Metric.MMD].value < report.row("distant").metric_values[Metric.MMD].value


def test_missing_embedding_drops_candidate(registry, tmp_path, rng):
    from kexops.emb1 import write_embedding
    from kexops.ranking import rank_candidates

    path = tmp_path / "t.emb1"
    write_embedding(EmbeddingMatrix(rng.normal(size=(50, 4))), path)
    make_dataset(registry, "target", embedding_ref=str(path))
    make_dataset(registry, "good", embedding_ref=str(path))
    make_dataset(registry, "no-emb")

    source = registry_embedding_source(registry, SamplingPlan(50, 1, 0))
    report = rank_candidates("target", ["good", "no-emb"], [Metric.MMD], source)
    assert report.final_order == ["good"]
    assert "no-emb" in report.dropped
