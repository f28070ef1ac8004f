"""Common scoring contract for trained classifiers."""

from abc import ABC, abstractmethod
from typing import ClassVar, List, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.special import expit

from hyperarousal.errors import FeatureOrderError
from hyperarousal.features.extraction import FEATURE_NAMES, FeatureVector
from hyperarousal.models.standardizer import Standardizer

MARGIN_CLAMP = 16.0


def clamped_logit(p):
    """logit(p) limited to [-16, 16] so pure leaves stay finite."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        margin = np.log(p) - np.log1p(-p)
    return np.clip(margin, -MARGIN_CLAMP, MARGIN_CLAMP)


class TrainedModel(ABC):
    """An immutable fitted classifier.

    ``decision_function`` returns raw margins (log-odds for trees and
    logistic regression, decision-function units for the SVM) and
    ``predict_proba_batch`` returns probabilities monotone in that margin.
    Inputs are raw feature rows in ``feature_names`` order; models that need
    standardization apply their own ``standardizer``.
    """

    kind: ClassVar[str]

    def __init__(
        self,
        spec,
        feature_names: Sequence[str] = FEATURE_NAMES,
        training_seed: int = 0,
        standardizer: Optional[Standardizer] = None,
    ):
        self.spec = spec
        self.feature_names: List[str] = list(feature_names)
        self.training_seed = int(training_seed)
        self.standardizer = standardizer

    @property
    def name(self) -> str:
        return self.spec.label

    def _matrix(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != len(self.feature_names):
            raise FeatureOrderError(
                f"expected rows of {len(self.feature_names)} features "
                f"({', '.join(self.feature_names)}), got shape {X.shape}"
            )
        return X

    def _scaled(self, X: np.ndarray) -> np.ndarray:
        if self.standardizer is None:
            return X
        return self.standardizer.transform(X)

    def decision_function(self, X) -> np.ndarray:
        return self._margins(self._scaled(self._matrix(X)))

    def predict_proba_batch(self, X) -> np.ndarray:
        Z = self._scaled(self._matrix(X))
        return self._probabilities(Z, self._margins(Z))

    def predict_proba(self, x: Union[FeatureVector, Mapping[str, float], Sequence[float]]) -> float:
        return float(self.predict_proba_batch(self.row_for(x))[0])

    def row_for(self, x) -> np.ndarray:
        """One feature row from a FeatureVector, a name->value mapping or a sequence."""
        if isinstance(x, FeatureVector):
            if list(FEATURE_NAMES) != self.feature_names:
                raise FeatureOrderError(
                    f"model feature order {self.feature_names} differs from {list(FEATURE_NAMES)}"
                )
            return x.as_array().reshape(1, -1)
        if isinstance(x, Mapping):
            if list(x.keys()) != self.feature_names:
                raise FeatureOrderError(
                    f"feature keys {list(x.keys())} do not match model order {self.feature_names}"
                )
            return np.asarray([x[name] for name in self.feature_names], dtype=float).reshape(1, -1)
        return self._matrix(x)

    def _probabilities(self, Z: np.ndarray, margins: np.ndarray) -> np.ndarray:
        return expit(margins)

    @abstractmethod
    def _margins(self, Z: np.ndarray) -> np.ndarray:
        """Raw margins for already-standardized rows."""

    @abstractmethod
    def parameters_to_dict(self) -> dict:
        pass

    @classmethod
    @abstractmethod
    def from_parameters(cls, spec, parameters: dict, feature_names, training_seed, standardizer):
        pass


class TreeEnsembleModel(TrainedModel):
    """Models whose margin is built from a list of trees (explainable by TreeSHAP)."""

    def __init__(self, spec, trees, **kwargs):
        super().__init__(spec, **kwargs)
        self.trees = list(trees)

    @property
    @abstractmethod
    def margin_offset(self) -> float:
        """Constant added to the combined tree output."""

    @property
    @abstractmethod
    def tree_weight(self) -> float:
        """Factor applied to each tree's output before summation."""

    def raw_sum(self, X: np.ndarray) -> np.ndarray:
        """margin_offset + tree_weight * sum of tree outputs, before any link."""
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return self.margin_offset + self.tree_weight * total
