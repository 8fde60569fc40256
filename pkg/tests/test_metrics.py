import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    auc_paircount,
    calinski_harabasz_bruteforce,
    davies_bouldin_bruteforce,
    silhouette_bruteforce,
)
from riskdynamics.errors import (
    LengthMismatchError,
    NonBinaryLabelsError,
    OneClassError,
    SingleClusterError,
)
from riskdynamics.metrics import (
    ConfusionMatrix2,
    accuracy,
    auc,
    calinski_harabasz,
    cluster_validity,
    confusion,
    davies_bouldin,
    silhouette,
)


def _close(a, b, tol=1e-12):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)


def _random_instance(rng):
    n = int(rng.integers(6, 51))
    d = int(rng.integers(1, 7))
    k = int(rng.integers(2, 4))
    x = rng.normal(size=(n, d))
    labels = rng.integers(0, k, size=n)
    labels[:k] = np.arange(k)  # every cluster non-empty
    return x, labels


class TestSilhouette:
    def test_perfect_separation(self):
        x = np.array([[0.0, 0.0], [0.0, 0.0], [9.0, 9.0], [9.0, 9.0]])
        labels = [0, 0, 1, 1]
        assert silhouette(x, labels) == pytest.approx(1.0, abs=1e-12)

    def test_matches_bruteforce_on_random_points(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(20, 3))
        labels = rng.integers(0, 2, size=20)
        labels[:2] = [0, 1]
        assert _close(silhouette(x, labels), silhouette_bruteforce(x, labels))

    def test_singleton_cluster_scores_zero(self):
        x = np.array([[0.0], [1.0], [2.0]])
        value = silhouette(x, [0, 0, 1])
        assert _close(value, silhouette_bruteforce(x, [0, 0, 1]))

    def test_single_cluster_raises(self):
        with pytest.raises(SingleClusterError):
            silhouette(np.zeros((3, 2)), [0, 0, 0])

    def test_range(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            x, labels = _random_instance(rng)
            assert -1.0 <= silhouette(x, labels) <= 1.0


class TestCalinskiHarabasz:
    def test_hand_computed_four_points(self):
        # centroids (0,1) and (10,1); between SS = 100, within SS = 4
        # -> (100/1) / (4/2) = 50
        x = np.array([[0.0, 0.0], [0.0, 2.0], [10.0, 0.0], [10.0, 2.0]])
        assert calinski_harabasz(x, [0, 0, 1, 1]) == pytest.approx(50.0, abs=1e-12)

    def test_duplicated_points_against_bruteforce(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(10, 2))
        labels = np.array([0, 0, 0, 1, 1, 1, 0, 1, 0, 1])
        doubled = np.vstack([x, x])
        doubled_labels = np.concatenate([labels, labels])
        assert _close(calinski_harabasz(doubled, doubled_labels),
                      calinski_harabasz_bruteforce(doubled, doubled_labels))

    def test_identical_points_give_inf(self):
        x = np.zeros((6, 2))
        assert math.isinf(calinski_harabasz(x, [0, 0, 0, 1, 1, 1]))

    def test_single_cluster_raises(self):
        with pytest.raises(SingleClusterError):
            calinski_harabasz(np.zeros((3, 2)), [1, 1, 1])


class TestDaviesBouldin:
    def test_tight_distant_blobs_near_zero(self):
        rng = np.random.default_rng(3)
        a = rng.normal(0, 1e-4, size=(10, 2))
        b = rng.normal(100, 1e-4, size=(10, 2))
        x = np.vstack([a, b])
        labels = [0] * 10 + [1] * 10
        assert davies_bouldin(x, labels) < 1e-4

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(15, 3))
        labels = rng.integers(0, 3, size=15)
        labels[:3] = [0, 1, 2]
        assert _close(davies_bouldin(x, labels),
                      davies_bouldin_bruteforce(x, labels))

    def test_coincident_centroids_give_inf(self):
        x = np.array([[0.0], [2.0], [0.0], [2.0]])
        assert math.isinf(davies_bouldin(x, [0, 0, 1, 1]))


def test_all_indices_match_bruteforce_on_many_instances():
    rng = np.random.default_rng(42)
    for _ in range(30):
        x, labels = _random_instance(rng)
        assert _close(silhouette(x, labels), silhouette_bruteforce(x, labels))
        assert _close(calinski_harabasz(x, labels),
                      calinski_harabasz_bruteforce(x, labels))
        assert _close(davies_bouldin(x, labels),
                      davies_bouldin_bruteforce(x, labels))


def test_cluster_validity_report(panel_features):
    rng = np.random.default_rng(5)
    labels = rng.integers(0, 2, size=panel_features.shape[0])
    labels[:2] = [0, 1]
    report = cluster_validity(panel_features.values, labels)
    assert -1 <= report.silhouette <= 1
    assert report.calinski_harabasz >= 0
    assert report.davies_bouldin >= 0
    assert not report.degenerate
    assert set(report.to_dict()) == {"silhouette", "calinski_harabasz",
                                     "davies_bouldin"}


class TestConfusion:
    def test_identical_vectors(self):
        y = [0, 1, 1, 0, 1]
        cm = confusion(y, y)
        assert (cm.c01, cm.c10) == (0, 0)
        assert accuracy(cm) == 1.0

    def test_reported_cells_accuracy(self):
        cm = ConfusionMatrix2(164, 2, 2, 215)
        assert cm.total == 383
        assert accuracy(cm) == pytest.approx(379 / 383)
        assert accuracy(cm) == pytest.approx(0.9896, abs=5e-4)

    def test_all_wrong_balanced(self):
        cm = confusion([0, 0, 1, 1], [1, 1, 0, 0])
        assert accuracy(cm) == 0.0

    def test_cell_semantics(self):
        cm = confusion([0, 0, 1, 1, 1], [0, 1, 1, 1, 0])
        assert (cm.c00, cm.c01, cm.c10, cm.c11) == (1, 1, 1, 2)
        assert cm.as_array() == [[1, 1], [1, 2]]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            confusion([0, 1], [0, 1, 1])

    def test_non_binary(self):
        with pytest.raises(NonBinaryLabelsError):
            confusion([0, 2], [0, 1])

    @given(st.lists(st.sampled_from([0, 1]), min_size=2, max_size=50))
    @settings(max_examples=50)
    def test_self_confusion_is_diagonal(self, y):
        if len(set(y)) < 2:
            return
        assert accuracy(confusion(y, y)) == 1.0


class TestAuc:
    def test_perfectly_ordered(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_all_ties(self):
        assert auc([0.5] * 6, [0, 1, 0, 1, 0, 1]) == 0.5

    def test_tied_fixture_matches_paircount_exactly(self):
        scores = [1.0, 2.0, 2.0, 3.0, 3.0, 3.0]
        labels = [0, 0, 1, 0, 1, 1]
        assert auc(scores, labels) == auc_paircount(scores, labels)

    def test_random_instances_match_paircount(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            n = int(rng.integers(4, 40))
            scores = rng.integers(0, 5, size=n).astype(float)  # many ties
            labels = rng.integers(0, 2, size=n)
            labels[:2] = [0, 1]
            assert auc(scores, labels) == auc_paircount(scores, labels)

    def test_one_class_raises(self):
        with pytest.raises(OneClassError):
            auc([0.1, 0.2], [1, 1])

    @given(st.data())
    @settings(max_examples=40)
    def test_invariant_under_monotone_transform(self, data):
        # quarter-grid scores keep distinct values distinct after the
        # strictly increasing transform (no float tie collapse)
        n = data.draw(st.integers(4, 30))
        grid = st.integers(-40, 40).map(lambda q: q / 4)
        scores = np.asarray(data.draw(st.lists(grid, min_size=n, max_size=n)))
        labels = data.draw(st.lists(st.sampled_from([0, 1]), min_size=n, max_size=n))
        if len(set(labels)) < 2:
            return
        scale = data.draw(st.floats(0.5, 4.0))
        shift = data.draw(st.floats(-3, 3))
        base = auc(scores, labels)
        transformed = auc(scores ** 3 + scale * scores + shift, labels)
        assert base == pytest.approx(transformed, abs=1e-12)
