import math

import numpy as np
import pytest

from hyperarousal.errors import InsufficientDataError
from hyperarousal.evaluation import (
    ConfusionMatrix,
    Regime,
    accuracy,
    cv5x2_from_differences,
    cv5x2_ttest,
    evaluate_scores,
    format_report,
    matrix_at_operating_point,
    matrix_at_threshold,
    roc_auc,
    t5_two_sided_p,
    write_comparisons,
    write_roc,
)
from hyperarousal.evaluation.cv import replication_halves
from hyperarousal.features.dataset import Dataset
from hyperarousal.features.extraction import FEATURE_NAMES
from hyperarousal.models import LogisticRegressionSpec


def pairwise_auc(scores, labels):
    """P(score+ > score-) + 0.5 * P(score+ == score-) by counting pairs."""
    positives = [s for s, y in zip(scores, labels) if y == 1]
    negatives = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in positives:
        for n in negatives:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(positives) * len(negatives))


def test_auc_matches_pair_counting_with_ties():
    """Test the trapezoid AUC against the pairwise definition on tied scores."""
    rng = np.random.default_rng(5)
    for _ in range(200):
        size = int(rng.integers(2, 201))
        scores = rng.integers(0, 21, size) / 20.0
        labels = rng.integers(0, 2, size)
        labels[:2] = [0, 1]
        assert roc_auc(scores, labels).auc == pytest.approx(pairwise_auc(scores, labels), abs=1e-12)


def test_roc_curve_shape():
    scores = [0.9, 0.8, 0.8, 0.3, 0.1]
    labels = [1, 1, 0, 1, 0]
    curve = roc_auc(scores, labels)
    assert curve.points()[0] == (0.0, 0.0, math.inf)
    assert curve.thresholds[1:].tolist() == [0.9, 0.8, 0.3, 0.1]
    assert curve.tp.tolist() == [0, 1, 2, 3, 3]
    assert curve.fp.tolist() == [0, 0, 1, 1, 2]
    assert (curve.fpr[-1], curve.tpr[-1]) == (1.0, 1.0)
    assert curve.auc == pytest.approx(pairwise_auc(scores, labels))


def test_perfect_and_inverted_rankings():
    assert roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]).auc == 1.0
    assert roc_auc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]).auc == 0.0
    assert roc_auc([0.5] * 4, [0, 1, 0, 1]).auc == 0.5


def test_roc_input_checks():
    with pytest.raises(InsufficientDataError):
        roc_auc([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        roc_auc([0.1, float("nan")], [0, 1])
    with pytest.raises(ValueError):
        roc_auc([0.1, 0.2], [0, 2])


def test_write_roc(tmp_path):
    path = tmp_path / "roc.csv"
    write_roc(roc_auc([0.9, 0.1], [1, 0]), path)
    assert path.read_text().splitlines() == ["fpr,tpr,threshold", "0.0,0.0,inf", "0.0,1.0,0.9", "1.0,1.0,0.1"]


def test_accuracy():
    assert accuracy(ConfusionMatrix(tp=3, fn=1, fp=2, tn=4, threshold=0.5)) == 0.7
    with pytest.raises(ValueError):
        accuracy(ConfusionMatrix(tp=0, fn=0, fp=0, tn=0, threshold=0.5))
    with pytest.raises(ValueError):
        accuracy(ConfusionMatrix(tp=-1, fn=1, fp=0, tn=0, threshold=0.5))


def test_matrix_at_threshold_is_inclusive():
    matrix = matrix_at_threshold([0.5, 0.4, 0.5, 0.9], [1, 1, 0, 0], 0.5)
    assert (matrix.tp, matrix.fn, matrix.fp, matrix.tn) == (1, 1, 2, 0)


def _scan(scores, labels, regime):
    """Exhaustive threshold search for the regime's operating point."""
    candidates = sorted(set(scores)) + [math.inf]
    matrices = [matrix_at_threshold(scores, labels, t) for t in candidates]
    if regime.kind == "tpr_floor":
        return max((m for m in matrices if m.tpr >= regime.value), key=lambda m: m.threshold)
    return min((m for m in matrices if m.fpr <= regime.value), key=lambda m: m.threshold)


@pytest.mark.parametrize(
    "regime",
    [
        Regime(kind="tpr_floor", value=1.0),
        Regime(kind="tpr_floor", value=0.5),
        Regime(kind="fpr_cap", value=0.1),
        Regime(kind="fpr_cap", value=0.0),
    ],
    ids=lambda regime: regime.name,
)
def test_operating_point_matches_exhaustive_scan(regime):
    """Test the selected threshold against a brute-force scan."""
    rng = np.random.default_rng(8)
    for _ in range(100):
        labels = rng.integers(0, 2, 60)
        labels[:2] = [0, 1]
        scores = np.round(rng.random(60) + 0.3 * labels, 2)
        chosen = matrix_at_operating_point(scores, labels, regime)
        assert chosen == _scan(scores.tolist(), labels, regime)


def test_full_recall_operating_point():
    """Test that TPR 1.0 picks the lowest-scoring positive as threshold."""
    matrix = matrix_at_operating_point([0.9, 0.7, 0.6, 0.4, 0.2], [1, 0, 1, 0, 0], Regime(kind="tpr_floor", value=1.0))
    assert matrix.threshold == 0.6
    assert (matrix.tp, matrix.fn, matrix.fp, matrix.tn) == (2, 0, 1, 2)


def test_t5_tail_probabilities():
    assert t5_two_sided_p(0.0) == pytest.approx(1.0)
    assert t5_two_sided_p(2.570582) == pytest.approx(0.05, abs=1e-6)
    assert t5_two_sided_p(-2.570582) == t5_two_sided_p(2.570582)
    assert t5_two_sided_p(math.inf) == 0.0


def test_cv5x2_statistic_formula():
    """Test t = p11 / sqrt(mean s_i^2) on a hand-made table."""
    table = np.array([[0.04, 0.02], [0.01, 0.03], [0.0, 0.02], [0.05, 0.01], [0.02, 0.02]])
    variances = [(a - (a + b) / 2) ** 2 + (b - (a + b) / 2) ** 2 for a, b in table]
    expected = 0.04 / math.sqrt(sum(variances) / 5)
    comparison = cv5x2_from_differences(table, "x", "y")
    assert comparison.t_statistic == pytest.approx(expected)
    assert comparison.p_value == pytest.approx(t5_two_sided_p(expected))
    assert not comparison.degenerate


def test_cv5x2_zero_variance():
    same = cv5x2_from_differences(np.zeros((5, 2)))
    assert (same.t_statistic, same.p_value, same.degenerate) == (0.0, 1.0, False)

    shifted = cv5x2_from_differences(np.full((5, 2), -0.1))
    assert shifted.t_statistic == -math.inf
    assert shifted.p_value == 0.0
    assert shifted.degenerate

    with pytest.raises(ValueError):
        cv5x2_from_differences(np.zeros((2, 5)))


def _dataset(n_participants=8, per_participant=20, seed=0):
    rng = np.random.default_rng(seed)
    n = n_participants * per_participant
    y = (np.arange(n) % 4 == 0).astype(np.int64)
    X = rng.normal(size=(n, len(FEATURE_NAMES))) + 1.0 * y[:, None]
    return Dataset(
        X=X,
        y=y,
        participant_ids=np.array([f"P{i // per_participant}" for i in range(n)], dtype=object),
        window_starts=np.arange(n, dtype=np.int64) * 30,
    )


def test_replication_halves_are_disjoint_and_seeded():
    participants = [f"P{i}" for i in range(9)]
    first, second = replication_halves(participants, seed=1, replication=0)
    assert not first & second
    assert first | second == set(participants)
    assert (len(first), len(second)) == (4, 5)
    assert replication_halves(participants, 1, 0) == (first, second)
    with pytest.raises(InsufficientDataError):
        replication_halves(["A", "B", "C"], 1, 0)


def test_identical_specs_give_zero_statistic(tmp_path):
    """Test that shared fold seeds make a spec indistinguishable from itself."""
    spec = LogisticRegressionSpec()
    comparison = cv5x2_ttest(spec, spec, _dataset(), seed=3, threads=1)
    assert comparison.t_statistic == 0.0
    assert comparison.p_value == 1.0
    assert not comparison.differences.any()

    path = tmp_path / "comparisons.csv"
    write_comparisons([comparison], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "model_a,model_b,t_statistic,p_value,degenerate"
    assert lines[1].endswith(",0.0,1.0,false")


def test_report_is_deterministic():
    """Test that the same evaluations produce the same report text."""
    test = _dataset(n_participants=3)
    rng = np.random.default_rng(2)
    scores = rng.random(len(test)) + 0.2 * test.y
    evaluation = evaluate_scores("logistic_regression", scores, test.y)
    comparison = cv5x2_from_differences(np.zeros((5, 2)), "a", "b")
    report = format_report([evaluation], [comparison], test)
    assert report == format_report([evaluation], [comparison], test)
    assert "AUC" in report
    assert "tpr_floor=0.5" in report
    assert "(zero variance)" not in report
    assert evaluation.balanced_regime == "tpr_floor=0.5"
    assert evaluation.accuracy_at_half == accuracy(matrix_at_threshold(scores, test.y, 0.5))


def test_auc_invariances():
    """Test AUC under a monotone transform and under swapped classes."""
    rng = np.random.default_rng(12)
    scores = rng.integers(0, 20, 80) / 20.0
    labels = rng.integers(0, 2, 80)
    labels[:2] = [0, 1]
    auc = roc_auc(scores, labels).auc
    assert roc_auc(np.exp(3.0 * scores), labels).auc == auc
    assert roc_auc(1.0 - scores, 1 - labels).auc == pytest.approx(auc, abs=1e-12)
