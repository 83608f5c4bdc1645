"""Report rendering: delimited tables plus matplotlib figures.

Similarity runs emit ``similarity.csv`` with a metric bar chart and, when
the quantized metrics are requested, the PRD curve and divergence frontier
figures. Ranking runs emit ``ranking.csv`` plus a rank-sum-ratio chart.
All figures are written as PNG files next to the CSV output.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import (
    Metric,
    MetricValue,
    divergence_frontier,
    pooled_histograms,
    prd_curve,
)
from .metrics.mauve import DEFAULT_SCALE_C, default_cluster_count, pca_project
from .metrics.prd import DEFAULT_CLUSTERS
from .ranking import SimilarityReport
from .types import EmbeddingMatrix


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _cap_rows(matrix: EmbeddingMatrix, cap: int, seed: int) -> np.ndarray:
    data = matrix.data
    if data.shape[0] <= cap:
        return np.asarray(data, dtype=np.float64)
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(data.shape[0], cap, replace=False))
    return np.asarray(data[idx], dtype=np.float64)


def render_similarity_report(
    out_dir: str | Path,
    results: dict[Metric, MetricValue],
    x: EmbeddingMatrix | None = None,
    y: EmbeddingMatrix | None = None,
    seed: int = 0,
    cap: int = 1000,
) -> list[Path]:
    """Write similarity.csv and figures; returns the created paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out / "similarity.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value", "direction"])
        for metric in sorted(results, key=lambda m: m.value):
            mv = results[metric]
            writer.writerow([metric.value, f"{mv.value:.10g}", mv.direction.value])
    written.append(csv_path)

    fig, ax = plt.subplots(figsize=(5, 3.2))
    names = [m.value for m in sorted(results, key=lambda m: m.value)]
    values = [results[m].value for m in sorted(results, key=lambda m: m.value)]
    ax.bar(names, values, color="#4878b0")
    ax.set_ylabel("metric value")
    ax.set_title("distributional similarity metrics")
    written.append(_save(fig, out / "similarity_metrics.png"))

    if x is not None and y is not None:
        xa = _cap_rows(x, cap, seed)
        ya = _cap_rows(y, cap, seed + 1)
        if Metric.PR_F1 in results:
            p, q = pooled_histograms(xa, ya, DEFAULT_CLUSTERS, seed=seed)
            precision, recall = prd_curve(p, q)
            fig, ax = plt.subplots(figsize=(4, 4))
            ax.plot(recall, precision, lw=2)
            ax.set_xlabel("recall")
            ax.set_ylabel("precision")
            ax.set_xlim(0, 1)
            ax.set_ylim(0, 1)
            ax.set_title("PRD curve")
            written.append(_save(fig, out / "prd_curve.png"))
        if Metric.MAUVE in results:
            pooled = pca_project(np.vstack([xa, ya]), min(16, xa.shape[1]))
            clusters = default_cluster_count(pooled.shape[0])
            p, q = pooled_histograms(pooled[: len(xa)], pooled[len(xa):], clusters, seed=seed)
            xs, ys = divergence_frontier(p, q, scale_c=DEFAULT_SCALE_C)
            order = np.argsort(xs)
            fig, ax = plt.subplots(figsize=(4, 4))
            ax.plot(xs[order], ys[order], lw=2, color="#b04848")
            ax.set_xlabel("exp(-c KL(Q||R))")
            ax.set_ylabel("exp(-c KL(P||R))")
            ax.set_xlim(0, 1)
            ax.set_ylim(0, 1)
            ax.set_title("divergence frontier")
            written.append(_save(fig, out / "divergence_frontier.png"))
    return written


def render_ranking_report(out_dir: str | Path, report: SimilarityReport) -> list[Path]:
    """Write ranking.csv plus the fused rank-sum-ratio chart."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    metrics = sorted({m for row in report.rows for m in row.metric_values}, key=lambda m: m.value)
    csv_path = out / "ranking.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["candidate"]
        for m in metrics:
            header += [f"{m.value}_value", f"{m.value}_rank"]
        header += ["weighted_rank_sum", "rank_sum_ratio"]
        writer.writerow(header)
        for cand in report.final_order:
            row = report.row(cand)
            fields = [cand]
            for m in metrics:
                fields += [f"{row.metric_values[m].value:.10g}", row.metric_ranks[m]]
            fields += [row.weighted_rank_sum, f"{row.rank_sum_ratio:.10g}"]
            writer.writerow(fields)
    written.append(csv_path)

    fig, ax = plt.subplots(figsize=(5, 0.6 * max(len(report.rows), 2) + 1.2))
    candidates = list(reversed(report.final_order))
    ratios = [report.row(c).rank_sum_ratio for c in candidates]
    ax.barh(candidates, ratios, color="#48a068")
    ax.set_xlabel("rank-sum ratio (lower = more similar)")
    ax.set_title(f"candidates for {report.target_dataset_id}")
    written.append(_save(fig, out / "rank_sum_ratio.png"))
    return written
