"""Summary and dependence data derived from SHAP attributions."""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from hyperarousal.explain.treeshap import ShapBatch, ShapExplanation
from hyperarousal.features.extraction import FEATURE_NAMES, FeatureVector
from hyperarousal.utils.file_utils import atomic_write

SUMMARY_COLUMNS = ["feature", "mean_abs_shap", "rank"]
VALUES_COLUMNS = ["feature", "instance", "feature_value", "shap_value"]


@dataclass(frozen=True)
class FeatureSummary:
    feature: str
    mean_abs_shap: float
    points: Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class SummaryData:
    """Features by descending mean |shap|, ties by name."""

    features: Tuple[FeatureSummary, ...]

    @property
    def order(self) -> List[str]:
        return [entry.feature for entry in self.features]


@dataclass(frozen=True)
class DependenceData:
    feature: str
    feature_values: Tuple[float, ...]
    shap_values: Tuple[float, ...]

    def __len__(self) -> int:
        return len(self.feature_values)


def _shap_matrix(explanations) -> np.ndarray:
    if isinstance(explanations, ShapBatch):
        return explanations.values
    if isinstance(explanations, np.ndarray):
        return np.atleast_2d(explanations)
    explanations = list(explanations)
    if not explanations:
        return np.zeros((0, len(FEATURE_NAMES)))
    if isinstance(explanations[0], ShapExplanation):
        return np.vstack([e.values for e in explanations])
    return np.asarray(explanations, dtype=float)


def _feature_matrix(features) -> np.ndarray:
    if isinstance(features, np.ndarray):
        return np.atleast_2d(features)
    features = list(features)
    if features and isinstance(features[0], FeatureVector):
        return np.vstack([f.as_array() for f in features])
    return np.asarray(features, dtype=float).reshape(len(features), -1)


def _paired(explanations, features) -> Tuple[np.ndarray, np.ndarray]:
    shap_values = _shap_matrix(explanations)
    feature_values = _feature_matrix(features)
    if shap_values.shape != feature_values.shape or shap_values.shape[1:] != (len(FEATURE_NAMES),):
        raise ValueError(
            f"explanations {shap_values.shape} and features {feature_values.shape} "
            f"must both be (n, {len(FEATURE_NAMES)})"
        )
    return shap_values, feature_values


def summarize(explanations, features) -> SummaryData:
    """Mean |shap| per feature, with every (feature value, shap value) pair.

    Raises:
        ValueError: empty input or mismatched dimensions.
    """
    shap_values, feature_values = _paired(explanations, features)
    if shap_values.shape[0] == 0:
        raise ValueError("summarize needs at least one explanation")
    means = np.mean(np.abs(shap_values), axis=0)
    entries = [
        FeatureSummary(
            feature=name,
            mean_abs_shap=float(means[column]),
            points=tuple(zip(feature_values[:, column].tolist(), shap_values[:, column].tolist())),
        )
        for column, name in enumerate(FEATURE_NAMES)
    ]
    entries.sort(key=lambda entry: (-entry.mean_abs_shap, entry.feature))
    return SummaryData(features=tuple(entries))


def dependence(explanations, features, feature_name: str) -> DependenceData:
    """(feature value, shap value) per instance for one feature, in input order."""
    if feature_name not in FEATURE_NAMES:
        raise ValueError(f"unknown feature {feature_name!r}; expected one of {list(FEATURE_NAMES)}")
    shap_values, feature_values = _paired(explanations, features)
    column = FEATURE_NAMES.index(feature_name)
    return DependenceData(
        feature=feature_name,
        feature_values=tuple(feature_values[:, column].tolist()),
        shap_values=tuple(shap_values[:, column].tolist()),
    )


def write_summary(summary: SummaryData, path):
    with atomic_write(path) as handle:
        handle.write(",".join(SUMMARY_COLUMNS) + "\n")
        for rank, entry in enumerate(summary.features, start=1):
            handle.write(f"{entry.feature},{entry.mean_abs_shap!r},{rank}\n")


def write_shap_values(explanations, features, path, instance_ids: Sequence[str] = ()):
    """Long-form export, one row per (feature, instance)."""
    shap_values, feature_values = _paired(explanations, features)
    ids = list(instance_ids) or [str(i) for i in range(shap_values.shape[0])]
    with atomic_write(path) as handle:
        handle.write(",".join(VALUES_COLUMNS) + "\n")
        for column, name in enumerate(FEATURE_NAMES):
            for row, instance in enumerate(ids):
                handle.write(
                    f"{name},{instance},{float(feature_values[row, column])!r},"
                    f"{float(shap_values[row, column])!r}\n"
                )
