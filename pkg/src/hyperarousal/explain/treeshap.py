"""Exact path-dependent TreeSHAP for the tree-ensemble models.

The recursion follows every root-to-leaf path once. The path structure
(features and zero fractions, which come from training cover) is the same
for every instance, so a whole batch is explained in one pass: one fractions
and path weights are carried as vectors over instances, and the branches that
depend on whether an instance follows a path are taken with ``np.where``.
Path arrays are never modified in place; each recursion level builds new
lists.

Attributions are in margin units. Boosted models are additive in the margin
already, so their values are exact Shapley values of the margin. Forest values
are exact Shapley values of the averaged leaf fraction, rescaled per row by
(margin - base) / sum(phi) into clamped-logit space: they add up to the margin
and keep each row's signs, but are not Shapley values of the margin itself.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from hyperarousal.errors import UnsupportedModelError
from hyperarousal.features.extraction import FeatureVector
from hyperarousal.models.base import TreeEnsembleModel, clamped_logit
from hyperarousal.models.boosting import GradientBoostModel
from hyperarousal.models.forest import RandomForestModel
from hyperarousal.models.tree import LEAF, Tree
from hyperarousal.utils.performance_profiler import timed

_FLAT_SUM = 1e-12


@dataclass(frozen=True, eq=False)
class ShapExplanation:
    """Attributions for one instance: base_value + values.sum() == margin."""

    values: np.ndarray
    base_value: float
    margin: float
    instance: int = 0


@dataclass(frozen=True, eq=False)
class ShapBatch:
    values: np.ndarray
    base_value: float
    margins: np.ndarray

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def explanations(self) -> List[ShapExplanation]:
        return [
            ShapExplanation(self.values[i], self.base_value, float(self.margins[i]), i)
            for i in range(len(self))
        ]


def _extend(features, zeros, ones, weights, depth, zero, one, feature):
    features = features + [feature]
    zeros = zeros + [zero]
    ones = ones + [one]
    weights = weights + [np.ones_like(one) if depth == 0 else np.zeros_like(one)]
    for i in range(depth - 1, -1, -1):
        weights[i + 1] = weights[i + 1] + one * weights[i] * (i + 1) / (depth + 1)
        weights[i] = zero * weights[i] * (depth - i) / (depth + 1)
    return features, zeros, ones, weights


def _unwind(features, zeros, ones, weights, depth, index):
    one = ones[index]
    zero = zeros[index]
    following = one != 0
    safe_one = np.where(following, one, 1.0)
    next_one = weights[depth]
    weights = list(weights)
    for i in range(depth - 1, -1, -1):
        scaled = next_one * (depth + 1) / ((i + 1) * safe_one)
        previous = weights[i]
        unscaled = previous * (depth + 1) / (zero * (depth - i))
        weights[i] = np.where(following, scaled, unscaled)
        next_one = np.where(following, previous - scaled * zero * (depth - i) / (depth + 1), next_one)
    keep = [k for k in range(depth + 1) if k != index]
    return (
        [features[k] for k in keep],
        [zeros[k] for k in keep],
        [ones[k] for k in keep],
        weights[:depth],
    )


def _unwound_sum(zeros, ones, weights, depth, index):
    one = ones[index]
    zero = zeros[index]
    following = one != 0
    safe_one = np.where(following, one, 1.0)
    next_one = weights[depth]
    total = np.zeros_like(next_one)
    for i in range(depth - 1, -1, -1):
        scaled = next_one * (depth + 1) / ((i + 1) * safe_one)
        unscaled = weights[i] / zero / ((depth - i) / (depth + 1))
        total = total + np.where(following, scaled, unscaled)
        next_one = np.where(
            following, weights[i] - scaled * zero * ((depth - i) / (depth + 1)), next_one
        )
    return total


def _recurse(tree, X, phi, scale, node, path, depth, zero, one, feature):
    features, zeros, ones, weights = _extend(*path, depth, zero, one, feature)
    split = int(tree.feature[node])
    if split == LEAF:
        value = tree.value[node] * scale
        for i in range(1, depth + 1):
            contribution = _unwound_sum(zeros, ones, weights, depth, i)
            phi[:, features[i]] += contribution * (ones[i] - zeros[i]) * value
        return

    incoming_zero = 1.0
    incoming_one = np.ones(X.shape[0])
    for k in range(1, depth + 1):
        if features[k] == split:
            incoming_zero = zeros[k]
            incoming_one = ones[k]
            features, zeros, ones, weights = _unwind(features, zeros, ones, weights, depth, k)
            depth -= 1
            break

    goes_left = X[:, split] <= tree.threshold[node]
    parent_cover = tree.cover[node]
    path = (features, zeros, ones, weights)
    for child, follows in ((tree.left[node], goes_left), (tree.right[node], ~goes_left)):
        _recurse(
            tree,
            X,
            phi,
            scale,
            int(child),
            path,
            depth + 1,
            tree.cover[child] / parent_cover * incoming_zero,
            incoming_one * follows,
            split,
        )


def tree_contributions(tree: Tree, X: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Shapley values of ``scale * tree(x)`` for every row of ``X``.

    For every row, ``scale * tree.expected_value() + phi.sum() == scale * tree.predict(x)``.
    """
    X = np.asarray(X, dtype=float)
    phi = np.zeros(X.shape)
    empty_path = ([], [], [], [])
    _recurse(tree, X, phi, scale, 0, empty_path, 0, 1.0, np.ones(X.shape[0]), -1)
    return phi


def _require_tree_model(model) -> TreeEnsembleModel:
    if not isinstance(model, (GradientBoostModel, RandomForestModel)):
        raise UnsupportedModelError(
            f"TreeSHAP explains tree ensembles only; {model.name} is a {model.kind} model"
        )
    return model


@timed("explain/tree_shap")
def tree_shap_batch(model, X) -> ShapBatch:
    """Explain every row of ``X`` in margin (log-odds) units.

    Raises:
        UnsupportedModelError: ``model`` is not a random forest or boosted model.
    """
    model = _require_tree_model(model)
    X = model._matrix(X)
    weight = model.tree_weight
    phi = np.zeros(X.shape)
    expected = 0.0
    for tree in model.trees:
        phi += tree_contributions(tree, X, weight)
        expected += weight * tree.expected_value()
    margins = model.decision_function(X)

    if isinstance(model, GradientBoostModel):
        return ShapBatch(values=phi, base_value=model.base_margin + expected, margins=margins)

    base = float(clamped_logit(expected))
    totals = phi.sum(axis=1)
    flat = np.abs(totals) <= _FLAT_SUM
    slope = 1.0 / (expected * (1.0 - expected)) if 0.0 < expected < 1.0 else 0.0
    factors = np.where(flat, slope, (margins - base) / np.where(flat, 1.0, totals))
    return ShapBatch(values=phi * factors[:, None], base_value=base, margins=margins)


def tree_shap(model, x) -> ShapExplanation:
    """Explain one FeatureVector (or feature row)."""
    row = model.row_for(x) if isinstance(x, FeatureVector) else np.asarray(x, dtype=float)
    return tree_shap_batch(model, row.reshape(1, -1)).explanations()[0]
