import math

import numpy as np
import pytest

from kexops.errors import MetricError
from kexops.metrics import Direction, pr_f1, prd_curve, prd_max_f1


def brute_force_max_f1(p, q, num_points=100_001):
    """Dense lambda-grid sweep with plain Python arithmetic."""
    lo, hi = 1e-10, math.pi / 2 - 1e-10
    best = 0.0
    for i in range(num_points):
        lam = math.tan(lo + i * (hi - lo) / (num_points - 1))
        alpha = sum(min(lam * pi, qi) for pi, qi in zip(p, q))
        beta = alpha / lam
        if alpha + beta > 0:
            best = max(best, 2 * alpha * beta / (alpha + beta))
    return best


def test_identical_histograms_reach_one():
    p = np.array([0.2, 0.3, 0.5])
    assert prd_max_f1(p, p) == pytest.approx(1.0, abs=1e-6)


def test_injected_histograms_match_brute_force():
    p = [0.5, 0.5, 0.0]
    q = [0.0, 0.5, 0.5]
    oracle = brute_force_max_f1(p, q)
    got = prd_max_f1(np.array(p), np.array(q))
    assert got == pytest.approx(oracle, abs=1e-6)
    assert got == pytest.approx(0.5, abs=1e-6)


def test_histogram_swap_symmetry(rng):
    for _ in range(5):
        p = rng.dirichlet(np.ones(8))
        q = rng.dirichlet(np.ones(8))
        assert prd_max_f1(p, q) == pytest.approx(prd_max_f1(q, p), abs=1e-12)


def test_disjoint_histograms_give_zero():
    p = np.array([1.0, 0.0])
    q = np.array([0.0, 1.0])
    assert prd_max_f1(p, q) == pytest.approx(0.0, abs=1e-9)


def test_curve_stays_in_unit_square(rng):
    p = rng.dirichlet(np.ones(12))
    q = rng.dirichlet(np.ones(12))
    precision, recall = prd_curve(p, q, 501)
    assert precision.min() >= 0 and precision.max() <= 1
    assert recall.min() >= 0 and recall.max() <= 1


def test_shuffled_copy_scores_near_one(rng):
    x = rng.normal(size=(150, 5))
    y = x[rng.permutation(150)]
    got = pr_f1(x, y)
    assert got.direction is Direction.SIMILARITY
    assert got.value >= 0.95


def test_far_separated_clouds_score_near_zero(rng):
    x = rng.normal(size=(150, 5))
    y = rng.normal(size=(150, 5)) + 100.0
    assert pr_f1(x, y).value < 0.05


def test_bounds_on_random_pairs(rng):
    for _ in range(20):
        n = int(rng.integers(15, 40))
        d = int(rng.integers(2, 6))
        x = rng.normal(size=(n, d)) * rng.uniform(0.1, 5)
        y = rng.normal(loc=rng.uniform(-3, 3), size=(n, d))
        v = pr_f1(x, y, clusters=8, seed=int(rng.integers(1 << 16))).value
        assert 0.0 <= v <= 1.0


def test_too_few_samples_for_clusters(rng):
    with pytest.raises(MetricError, match="too few"):
        pr_f1(rng.normal(size=(4, 2)), rng.normal(size=(4, 2)), clusters=20)


def test_cluster_floor(rng):
    with pytest.raises(MetricError, match="at least 2"):
        pr_f1(rng.normal(size=(10, 2)), rng.normal(size=(10, 2)), clusters=1)
