"""Family-independent training and scoring entry points."""

from typing import Optional

import numpy as np

from hyperarousal.errors import InsufficientDataError
from hyperarousal.features.dataset import Dataset
from hyperarousal.features.extraction import FEATURE_NAMES
from hyperarousal.logger import Logger
from hyperarousal.models.base import TrainedModel
from hyperarousal.models.boosting import train_boosting
from hyperarousal.models.forest import train_forest
from hyperarousal.models.logistic import train_logistic
from hyperarousal.models.specs import (
    GradientBoostSpec,
    LogisticRegressionSpec,
    RandomForestSpec,
    RbfSvmSpec,
)
from hyperarousal.models.svm import train_svm
from hyperarousal.utils.performance_profiler import Timer


def train(spec, data: Dataset, seed: int, threads: Optional[int] = None) -> TrainedModel:
    """Fit ``spec`` on ``data``.

    Raises:
        InsufficientDataError: ``data`` lacks one of the classes.
        ValueError: ``data`` contains non-finite feature values.
        ConvergenceError: the optimizer hit its iteration cap.
    """
    if not data.has_both_classes():
        raise InsufficientDataError(
            f"training {spec.label} needs both classes (counts {data.class_counts()})"
        )
    if not np.all(np.isfinite(data.X)):
        raise ValueError("training features contain missing or non-finite values")
    Logger.print_debug(f"training {spec.label} on {len(data)} rows (seed {seed})")
    X, y = data.X, data.y
    with Timer(f"train {spec.label}", log=False):
        if isinstance(spec, RandomForestSpec):
            return train_forest(spec, X, y, seed, FEATURE_NAMES, threads)
        if isinstance(spec, GradientBoostSpec):
            return train_boosting(spec, X, y, seed, FEATURE_NAMES)
        if isinstance(spec, LogisticRegressionSpec):
            return train_logistic(spec, X, y, seed, FEATURE_NAMES)
        if isinstance(spec, RbfSvmSpec):
            return train_svm(spec, X, y, seed, FEATURE_NAMES)
    raise TypeError(f"unknown model spec {type(spec).__name__}")


def predict_proba(model: TrainedModel, x) -> float:
    """Probability of the positive class for one FeatureVector (or mapping/row)."""
    return model.predict_proba(x)


def predict_proba_batch(model: TrainedModel, X) -> np.ndarray:
    return model.predict_proba_batch(X)


def decision_function(model: TrainedModel, X) -> np.ndarray:
    return model.decision_function(X)
