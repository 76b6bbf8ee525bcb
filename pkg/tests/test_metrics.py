import itertools

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score

from contraclust.errors import ShapeError
from contraclust.metrics import acc, ari, cluster_sizes, contingency, hungarian, nmi, variance_report


def brute_force_assignment(cost):
    k = cost.shape[0]
    best_perm, best_total = None, np.inf
    for perm in itertools.permutations(range(k)):
        total = sum(cost[i, perm[i]] for i in range(k))
        if total < best_total:
            best_total, best_perm = total, perm
    return np.array(best_perm), best_total


def test_hungarian_identity_favoring_cost():
    cost = np.ones((3, 3)) - np.eye(3)
    assert np.array_equal(hungarian(cost), [0, 1, 2])


def test_hungarian_two_by_two_example():
    cost = np.array([[4.0, 1.0], [2.0, 8.0]])
    perm = hungarian(cost)
    assert np.array_equal(perm, [1, 0])
    assert cost[np.arange(2), perm].sum() == 3.0


def test_hungarian_matches_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(100):
        k = int(rng.integers(2, 7))
        cost = rng.uniform(0.0, 10.0, size=(k, k))
        perm = hungarian(cost)
        _, best_total = brute_force_assignment(cost)
        assert cost[np.arange(k), perm].sum() == pytest.approx(best_total, abs=1e-12)


def test_hungarian_rejects_nonsquare():
    with pytest.raises(ShapeError):
        hungarian(np.ones((2, 3)))


def test_acc_perfect_and_relabeled():
    truth = np.array([0, 0, 1, 1, 2, 2])
    assert acc(truth, truth, 3) == 1.0
    relabeled = np.array([2, 2, 0, 0, 1, 1])
    assert acc(relabeled, truth, 3) == 1.0


def test_acc_hand_enumerated_fixtures():
    assert acc([0, 0, 1, 1], [1, 1, 0, 0], 2) == 1.0
    assert acc([0, 1, 1, 1], [0, 0, 1, 1], 2) == 0.75


def test_acc_input_validation():
    with pytest.raises(ShapeError):
        acc([0, 1], [0, 1, 1], 2)
    with pytest.raises(ShapeError):
        acc([0, 5], [0, 1], 2)


def test_acc_beats_chance_on_balanced_truth():
    rng = np.random.default_rng(1)
    k = 4
    truth = np.repeat(np.arange(k), 25)
    for _ in range(20):
        pred = rng.integers(0, k, size=truth.size)
        assert acc(pred, truth, k) >= 1.0 / k


def test_nmi_fixtures():
    assert nmi([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(1.0, abs=1e-12)
    assert nmi([0, 0, 0, 0], [0, 1, 0, 1]) == 0.0
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-12)


def test_ari_fixtures():
    assert ari([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(1.0, abs=1e-12)
    assert ari([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(-0.5, abs=1e-12)


def test_relabeling_invariance_of_all_metrics():
    rng = np.random.default_rng(2)
    for _ in range(20):
        k = int(rng.integers(2, 6))
        n = int(rng.integers(10, 60))
        pred = rng.integers(0, k, size=n)
        truth = rng.integers(0, k, size=n)
        perm = rng.permutation(k)
        relabeled = perm[pred]
        assert acc(relabeled, truth, k) == pytest.approx(acc(pred, truth, k), abs=1e-12)
        assert nmi(relabeled, truth) == pytest.approx(nmi(pred, truth), abs=1e-12)
        assert ari(relabeled, truth) == pytest.approx(ari(pred, truth), abs=1e-12)


def test_nmi_ari_match_sklearn():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(8, 80))
        pred = rng.integers(0, int(rng.integers(2, 6)), size=n)
        truth = rng.integers(0, int(rng.integers(2, 6)), size=n)
        if len(np.unique(pred)) < 2 or len(np.unique(truth)) < 2:
            continue
        assert nmi(pred, truth) == pytest.approx(
            normalized_mutual_info_score(truth, pred, average_method="geometric"), abs=1e-9)
        assert ari(pred, truth) == pytest.approx(adjusted_rand_score(truth, pred), abs=1e-9)


def test_contingency_sums_to_n():
    pred = np.array([0, 1, 1, 2])
    truth = np.array([1, 1, 0, 2])
    table = contingency(pred, truth, 3)
    assert table.sum() == 4
    assert table[1, 1] == 1 and table[0, 1] == 1


def test_cluster_sizes():
    sizes = cluster_sizes([0, 0, 2, 1, 0], 4)
    assert np.array_equal(sizes, [3, 1, 1, 0])
    assert sizes.sum() == 5


def test_variance_report_identical_rows():
    p = np.full((6, 3), 1.0 / 3.0)
    truth = np.array([0, 0, 0, 1, 1, 1])
    intra, inter = variance_report(p, truth)
    assert intra == [0.0, 0.0]
    assert inter == 0.0


def test_variance_report_one_hot_classes():
    p = np.array([[1.0, 0.0]] * 3 + [[0.0, 1.0]] * 3)
    truth = np.array([0] * 3 + [1] * 3)
    intra, inter = variance_report(p, truth)
    assert intra == [0.0, 0.0]
    assert inter == pytest.approx(0.5, abs=1e-12)


def test_variance_report_translation_invariant_inter():
    rng = np.random.default_rng(4)
    p = rng.random((12, 4))
    truth = rng.integers(0, 3, size=12)
    _, inter = variance_report(p, truth)
    _, inter_shifted = variance_report(p + 7.5, truth)
    assert inter == pytest.approx(inter_shifted, abs=1e-9)


def test_variance_report_skips_absent_classes():
    p = np.random.default_rng(5).random((4, 2))
    truth = np.array([0, 0, 3, 3])  # classes 1, 2 absent
    intra, inter = variance_report(p, truth)
    assert len(intra) == 2
