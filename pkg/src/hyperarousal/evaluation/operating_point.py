"""Confusion matrices at fixed thresholds and at constrained operating points."""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hyperarousal.evaluation.roc import check_scored, roc_auc


class Regime(BaseModel):
    """``tpr_floor``: largest threshold with TPR >= value.
    ``fpr_cap``: smallest threshold with FPR <= value."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["tpr_floor", "fpr_cap"]
    value: float = Field(ge=0.0, le=1.0)

    @property
    def name(self) -> str:
        return f"{self.kind}={self.value:g}"


DEFAULT_REGIMES = (
    Regime(kind="tpr_floor", value=1.0),
    Regime(kind="tpr_floor", value=0.5),
    Regime(kind="fpr_cap", value=0.1),
)

BALANCED_REGIME = DEFAULT_REGIMES[1]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    fp: int
    tn: int
    threshold: float

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    @property
    def tpr(self) -> float:
        positives = self.tp + self.fn
        return self.tp / positives if positives else 0.0

    @property
    def fpr(self) -> float:
        negatives = self.fp + self.tn
        return self.fp / negatives if negatives else 0.0


def accuracy(matrix: ConfusionMatrix) -> float:
    """(tp + tn) / total."""
    if min(matrix.tp, matrix.fn, matrix.fp, matrix.tn) < 0:
        raise ValueError("confusion counts must be non-negative")
    if matrix.total == 0:
        raise ValueError("accuracy of an empty confusion matrix")
    return (matrix.tp + matrix.tn) / matrix.total


def matrix_at_threshold(scores, labels, threshold: float) -> ConfusionMatrix:
    """Counts with ``score >= threshold`` predicted positive."""
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels).ravel().astype(np.int64)
    predicted = scores >= threshold
    actual = labels == 1
    return ConfusionMatrix(
        tp=int(np.sum(predicted & actual)),
        fn=int(np.sum(~predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        threshold=float(threshold),
    )


def select_threshold(curve, regime: Regime) -> float:
    """Threshold on ``curve`` meeting ``regime``; +inf (FPR 0) is always feasible for caps."""
    if regime.kind == "tpr_floor":
        feasible = np.flatnonzero(curve.tpr >= regime.value)
        return float(curve.thresholds[feasible[0]])
    feasible = np.flatnonzero(curve.fpr <= regime.value)
    return float(curve.thresholds[feasible[-1]])


def matrix_at_operating_point(scores, labels, regime: Regime) -> ConfusionMatrix:
    """Confusion matrix at the threshold chosen by ``regime``.

    Raises:
        InsufficientDataError: Only one class is present.
    """
    scores, labels = check_scored(scores, labels)
    threshold = select_threshold(roc_auc(scores, labels), regime)
    return matrix_at_threshold(scores, labels, threshold)
