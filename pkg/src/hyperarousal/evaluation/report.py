"""Per-model evaluation on the test split and the plain-text report."""

from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from hyperarousal.evaluation.cv import CvComparison
from hyperarousal.evaluation.operating_point import (
    BALANCED_REGIME,
    DEFAULT_REGIMES,
    ConfusionMatrix,
    Regime,
    accuracy,
    matrix_at_operating_point,
    matrix_at_threshold,
)
from hyperarousal.evaluation.roc import RocCurve, roc_auc
from hyperarousal.features.dataset import Dataset
from hyperarousal.utils.file_utils import atomic_write

REPORT_TITLE = "Hyperarousal detection evaluation report"


@dataclass(frozen=True, eq=False)
class ModelEvaluation:
    name: str
    curve: RocCurve
    matrices: Dict[str, ConfusionMatrix]
    at_half: ConfusionMatrix
    balanced_regime: str

    @property
    def auc(self) -> float:
        return self.curve.auc

    @property
    def accuracy_at_half(self) -> float:
        return accuracy(self.at_half)

    @property
    def accuracy_balanced(self) -> float:
        return accuracy(self.matrices[self.balanced_regime])


def evaluate_scores(
    name: str,
    scores: np.ndarray,
    labels: np.ndarray,
    regimes: Sequence[Regime] = DEFAULT_REGIMES,
) -> ModelEvaluation:
    """ROC, the regime matrices and the matrix at threshold 0.5."""
    regimes = list(regimes)
    balanced = BALANCED_REGIME if BALANCED_REGIME in regimes else regimes[0]
    return ModelEvaluation(
        name=name,
        curve=roc_auc(scores, labels),
        matrices={
            regime.name: matrix_at_operating_point(scores, labels, regime) for regime in regimes
        },
        at_half=matrix_at_threshold(scores, labels, 0.5),
        balanced_regime=balanced.name,
    )


def evaluate_model(model, test: Dataset, regimes: Sequence[Regime] = DEFAULT_REGIMES) -> ModelEvaluation:
    return evaluate_scores(model.name, model.predict_proba_batch(test.X), test.y, regimes)


def _matrix_line(label: str, matrix: ConfusionMatrix) -> str:
    return (
        f"  {label:<16} {matrix.threshold:>10.6f} {matrix.tp:>6d} {matrix.fn:>6d} "
        f"{matrix.fp:>6d} {matrix.tn:>6d} {matrix.tpr:>6.3f} {matrix.fpr:>6.3f} "
        f"{accuracy(matrix):>8.4f}"
    )


def format_report(
    evaluations: Sequence[ModelEvaluation],
    comparisons: Sequence[CvComparison],
    test: Dataset,
) -> str:
    counts = test.class_counts()
    lines = [
        REPORT_TITLE,
        f"test windows: {len(test)} (positive {counts[1]}, negative {counts[0]}); "
        f"participants: {len(test.participants())}",
        "",
    ]
    header = (
        f"  {'operating point':<16} {'threshold':>10} {'TP':>6} {'FN':>6} "
        f"{'FP':>6} {'TN':>6} {'TPR':>6} {'FPR':>6} {'accuracy':>8}"
    )
    for evaluation in evaluations:
        lines.append(f"== {evaluation.name} ==")
        lines.append(f"  AUC {evaluation.auc:.4f}")
        lines.append(f"  accuracy at threshold 0.5: {evaluation.accuracy_at_half:.4f}")
        lines.append(
            f"  accuracy at balanced point ({evaluation.balanced_regime}): "
            f"{evaluation.accuracy_balanced:.4f}"
        )
        lines.append(header)
        for label, matrix in evaluation.matrices.items():
            lines.append(_matrix_line(label, matrix))
        lines.append(_matrix_line("threshold=0.5", evaluation.at_half))
        lines.append("")
    if comparisons:
        lines.append("== pairwise comparisons (5x2cv paired t-test, 5 df) ==")
        lines.append(f"  {'model_a':<22} {'model_b':<22} {'t':>10} {'p':>10}")
        for c in comparisons:
            flag = "  (zero variance)" if c.degenerate else ""
            lines.append(
                f"  {c.model_a:<22} {c.model_b:<22} {c.t_statistic:>10.3f} {c.p_value:>10.4g}{flag}"
            )
        lines.append("")
    return "\n".join(lines)


def write_report(evaluations, comparisons, test: Dataset, path):
    with atomic_write(path) as handle:
        handle.write(format_report(evaluations, comparisons, test))
