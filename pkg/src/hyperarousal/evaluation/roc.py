"""Empirical ROC curves and AUC.

A window is predicted positive iff its score is >= the threshold. Thresholds
run over the distinct scores in descending order, preceded by +inf (the
(0, 0) corner), so equal scores form a single step.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from hyperarousal.errors import InsufficientDataError
from hyperarousal.utils.file_utils import atomic_write

ROC_COLUMNS = ["fpr", "tpr", "threshold"]


def check_scored(scores, labels) -> Tuple[np.ndarray, np.ndarray]:
    """Validate a score/label pair and return them as arrays.

    Raises:
        ValueError: Shapes differ, labels are not 0/1, or scores are NaN.
        InsufficientDataError: Only one class is present.
    """
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise ValueError(f"{scores.size} scores for {labels.size} labels")
    if np.isnan(scores).any():
        raise ValueError("scores contain NaN")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    labels = labels.astype(np.int64)
    positives = int(labels.sum())
    if positives == 0 or positives == labels.size:
        raise InsufficientDataError("ROC analysis needs both classes")
    return scores, labels


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Points ordered by descending threshold (fpr and tpr non-decreasing)."""

    thresholds: np.ndarray
    tp: np.ndarray
    fp: np.ndarray
    positives: int
    negatives: int
    auc: float

    @property
    def tpr(self) -> np.ndarray:
        return self.tp / self.positives

    @property
    def fpr(self) -> np.ndarray:
        return self.fp / self.negatives

    def points(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist(), self.thresholds.tolist()))


def roc_auc(scores, labels) -> RocCurve:
    """ROC over all distinct thresholds; AUC by the trapezoid rule on integer counts.

    The trapezoid area equals P(score+ > score-) + 0.5 * P(score+ == score-).
    """
    scores, labels = check_scored(scores, labels)
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    step_ends = np.append(np.flatnonzero(np.diff(sorted_scores)), sorted_scores.size - 1)
    cumulative_tp = np.cumsum(sorted_labels)[step_ends]
    cumulative_fp = step_ends + 1 - cumulative_tp
    tp = np.concatenate([[0], cumulative_tp]).astype(np.int64)
    fp = np.concatenate([[0], cumulative_fp]).astype(np.int64)
    thresholds = np.concatenate([[np.inf], sorted_scores[step_ends]])
    positives = int(tp[-1])
    negatives = int(fp[-1])
    # twice the area in count units, exact in integers
    doubled = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = doubled / (2.0 * positives * negatives)
    return RocCurve(
        thresholds=thresholds,
        tp=tp,
        fp=fp,
        positives=positives,
        negatives=negatives,
        auc=auc,
    )


def write_roc(curve: RocCurve, path):
    with atomic_write(path) as handle:
        handle.write(",".join(ROC_COLUMNS) + "\n")
        for fpr, tpr, threshold in curve.points():
            handle.write(f"{fpr!r},{tpr!r},{threshold!r}\n")
