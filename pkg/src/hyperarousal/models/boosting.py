"""Newton gradient boosting on the logistic loss."""

import math

import numpy as np
from scipy.special import expit

from hyperarousal.logger import Logger
from hyperarousal.models.base import TreeEnsembleModel
from hyperarousal.models.specs import GradientBoostSpec
from hyperarousal.models.tree import NewtonCriterion, Tree, grow_tree

_RATE_CLIP = 1e-6


def base_rate_margin(y: np.ndarray) -> float:
    rate = min(max(float(np.mean(y)), _RATE_CLIP), 1.0 - _RATE_CLIP)
    return math.log(rate / (1.0 - rate))


def logistic_gradients(y: np.ndarray, margin: np.ndarray):
    """First and second derivatives of log-loss with respect to the margin."""
    p = expit(margin)
    return p - y, p * (1.0 - p)


class GradientBoostModel(TreeEnsembleModel):
    """margin = base_margin + sum of tree outputs (shrinkage already in the leaves)."""

    kind = "gradient_boost"

    def __init__(self, spec, trees, base_margin: float, **kwargs):
        super().__init__(spec, trees, **kwargs)
        self.base_margin = float(base_margin)

    @property
    def margin_offset(self) -> float:
        return self.base_margin

    @property
    def tree_weight(self) -> float:
        return 1.0

    def _margins(self, Z):
        return self.raw_sum(Z)

    def parameters_to_dict(self) -> dict:
        return {
            "base_margin": self.base_margin,
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_parameters(cls, spec, parameters, feature_names, training_seed, standardizer):
        trees = [Tree.from_dict(tree) for tree in parameters["trees"]]
        return cls(
            spec,
            trees,
            base_margin=float(parameters["base_margin"]),
            feature_names=feature_names,
            training_seed=training_seed,
            standardizer=standardizer,
        )


def train_boosting(
    spec: GradientBoostSpec, X: np.ndarray, y: np.ndarray, seed: int, feature_names
) -> GradientBoostModel:
    """Fit ``spec.trees`` rounds sequentially; no randomness is involved."""
    labels = np.asarray(y, dtype=float)
    base = spec.base_margin if spec.base_margin is not None else base_rate_margin(labels)
    criterion = NewtonCriterion(spec.l2_leaf_penalty, spec.learning_rate, spec.min_child_weight)
    margin = np.full(X.shape[0], base)
    ones = np.ones(X.shape[0])
    trees = []
    for round_index in range(spec.trees):
        gradient, hessian = logistic_gradients(labels, margin)
        tree = grow_tree(
            X,
            a=hessian,
            b=gradient,
            cover_weights=ones,
            criterion=criterion,
            max_depth=spec.max_depth,
        )
        margin = margin + tree.predict(X)
        trees.append(tree)
        if Logger.is_debug_enabled() and (round_index + 1) % 10 == 0:
            p = np.clip(expit(margin), 1e-15, 1 - 1e-15)
            loss = -np.mean(labels * np.log(p) + (1 - labels) * np.log1p(-p))
            Logger.print_debug(f"boosting round {round_index + 1}: train log-loss {loss:.5f}")
    return GradientBoostModel(
        spec, trees, base_margin=base, feature_names=feature_names, training_seed=seed
    )
