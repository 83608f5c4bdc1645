import numpy as np
import pytest

from kexops.errors import MetricError
from kexops.metrics import kmeans_assign, pooled_histograms


def test_seeded_determinism(rng):
    pts = rng.normal(size=(120, 4))
    l1, c1 = kmeans_assign(pts, 7, seed=3)
    l2, c2 = kmeans_assign(pts, 7, seed=3)
    assert np.array_equal(l1, l2)
    assert np.array_equal(c1, c2)


def test_separated_blobs_recovered(rng):
    a = rng.normal(size=(40, 2))
    b = rng.normal(size=(40, 2)) + 50.0
    labels, _ = kmeans_assign(np.vstack([a, b]), 2, seed=0)
    assert len(set(labels[:40])) == 1
    assert len(set(labels[40:])) == 1
    assert labels[0] != labels[40]


def test_identical_points_assign_to_lowest_index():
    pts = np.ones((6, 2))
    labels, _ = kmeans_assign(pts, 2, seed=0)
    assert (labels == 0).all()


def test_histograms_share_support_and_normalize(rng):
    x = rng.normal(size=(60, 3))
    y = rng.normal(size=(90, 3))
    p, q = pooled_histograms(x, y, 10, seed=1)
    assert p.shape == q.shape == (10,)
    assert p.sum() == pytest.approx(1.0)
    assert q.sum() == pytest.approx(1.0)


def test_rejects_bad_cluster_counts(rng):
    pts = rng.normal(size=(5, 2))
    with pytest.raises(MetricError):
        kmeans_assign(pts, 1)
    with pytest.raises(MetricError):
        kmeans_assign(pts, 9)
