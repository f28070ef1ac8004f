"""Binary decision trees stored as flat node arrays.

Trees are grown depth-first on per-feature presorted row orders. Every row
carries two statistics ``a`` and ``b`` (weight and weighted positives for Gini
trees; hessian and gradient for Newton trees), and a split criterion turns
prefix sums of those into gains and leaf values. ``x[f] <= threshold`` goes
left.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

LEAF = -1
_GAIN_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Tree:
    """Node ``i`` is a leaf iff ``feature[i] == -1``; node 0 is the root."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    cover: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] == LEAF

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        X = np.asarray(X, dtype=float)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            current = node[rows]
            go_left = X[rows, self.feature[current]] <= self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])
            active[rows] = self.feature[node[rows]] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def expected_value(self) -> float:
        """Cover-weighted mean of the leaf values."""
        leaves = self.feature == LEAF
        return float(np.sum(self.value[leaves] * self.cover[leaves]) / self.cover[0])

    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def used_features(self) -> set:
        return {int(f) for f in self.feature if f != LEAF}

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "cover": self.cover.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Tree":
        tree = cls(
            feature=np.asarray(data["feature"], dtype=np.int64),
            threshold=np.asarray(data["threshold"], dtype=float),
            left=np.asarray(data["left"], dtype=np.int64),
            right=np.asarray(data["right"], dtype=np.int64),
            value=np.asarray(data["value"], dtype=float),
            cover=np.asarray(data["cover"], dtype=float),
        )
        tree.check()
        return tree

    def check(self):
        """Structural sanity: equal lengths and in-range child links."""
        n = self.node_count
        if n == 0:
            raise ValueError("tree has no nodes")
        for name in ("threshold", "left", "right", "value", "cover"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"tree array {name} has the wrong length")
        internal = self.feature != LEAF
        for links in (self.left[internal], self.right[internal]):
            if links.size and (links.min() <= 0 or links.max() >= n):
                raise ValueError("tree child index out of range")


class SplitCriterion(ABC):
    """Scores candidate partitions from (a, b) sums."""

    @abstractmethod
    def node_score(self, a, b):
        """Larger is better; gain is a function of child and parent scores."""

    @abstractmethod
    def leaf_value(self, a: float, b: float) -> float:
        pass

    @abstractmethod
    def gain(self, left_score, right_score, parent_score):
        pass

    def admissible(self, a_left, a_right):
        return np.ones(np.shape(a_left), dtype=bool)

    @abstractmethod
    def can_split(self, a: float, b: float, cover: float) -> bool:
        pass


class GiniCriterion(SplitCriterion):
    """a = row weight, b = weight of positive rows."""

    def __init__(self, min_samples_split: int = 2):
        self.min_samples_split = min_samples_split

    def node_score(self, a, b):
        # minus the weighted Gini impurity: a * 2p(1 - p)
        return -2.0 * b * (a - b) / a

    def leaf_value(self, a, b):
        return float(b / a)

    def gain(self, left_score, right_score, parent_score):
        return left_score + right_score - parent_score

    def can_split(self, a, b, cover):
        return cover >= self.min_samples_split and 0.0 < b < a


class NewtonCriterion(SplitCriterion):
    """a = hessian, b = gradient of the loss at the current margin."""

    def __init__(self, l2_leaf_penalty: float, learning_rate: float, min_child_weight: float):
        self.l2 = l2_leaf_penalty
        self.learning_rate = learning_rate
        self.min_child_weight = min_child_weight

    def node_score(self, a, b):
        denominator = np.asarray(a + self.l2, dtype=float)
        safe = np.where(denominator > 0, denominator, 1.0)
        return np.where(denominator > 0, b * b / safe, 0.0)

    def leaf_value(self, a, b):
        denominator = a + self.l2
        if denominator <= 0:
            return 0.0
        return float(-b / denominator * self.learning_rate)

    def gain(self, left_score, right_score, parent_score):
        return 0.5 * (left_score + right_score - parent_score)

    def admissible(self, a_left, a_right):
        return (a_left >= self.min_child_weight) & (a_right >= self.min_child_weight)

    def can_split(self, a, b, cover):
        return cover >= 2


def split_threshold(low: float, high: float) -> float:
    """Midpoint of two consecutive distinct values, kept strictly below ``high``."""
    middle = 0.5 * (low + high)
    return middle if middle < high else low


@dataclass
class _Best:
    gain: float
    feature: int
    position: int


def _best_split(X, a, b, orders, candidates, criterion, a_sum, b_sum) -> Optional[_Best]:
    parent_score = criterion.node_score(a_sum, b_sum)
    best = None
    for f in candidates:
        rows = orders[f]
        values = X[rows, f]
        distinct = values[:-1] < values[1:]
        if not distinct.any():
            continue
        positions = np.flatnonzero(distinct)
        a_left = np.cumsum(a[rows])[positions]
        b_left = np.cumsum(b[rows])[positions]
        a_right = a_sum - a_left
        b_right = b_sum - b_left
        ok = criterion.admissible(a_left, a_right)
        if not ok.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = criterion.gain(
                criterion.node_score(a_left, b_left),
                criterion.node_score(a_right, b_right),
                parent_score,
            )
        gains = np.where(ok & np.isfinite(gains), gains, -np.inf)
        k = int(np.argmax(gains))
        if best is None or gains[k] > best.gain:
            best = _Best(float(gains[k]), int(f), int(positions[k]))
    threshold = _GAIN_EPS * (1.0 + abs(float(parent_score)))
    if best is None or not best.gain > threshold:
        return None
    return best


def grow_tree(
    X: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    cover_weights: np.ndarray,
    criterion: SplitCriterion,
    max_depth: int,
    mtry: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> Tree:
    """Grow one tree over the rows with positive ``cover_weights``.

    With ``mtry`` below the feature count, each node searches a fresh random
    subset of features drawn from ``rng``. Ties in gain keep the lowest
    feature index, then the lowest threshold.
    """
    X = np.asarray(X, dtype=float)
    n_rows, n_features = X.shape
    rows = np.flatnonzero(cover_weights > 0)
    if rows.size == 0:
        raise ValueError("cannot grow a tree without rows")
    subsample = mtry is not None and mtry < n_features
    if subsample and rng is None:
        raise ValueError("feature subsampling needs a random generator")
    orders = [rows[np.argsort(X[rows, f], kind="stable")] for f in range(n_features)]

    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    value: List[float] = []
    cover: List[float] = []

    def new_node(node_rows):
        a_sum = float(np.sum(a[node_rows]))
        b_sum = float(np.sum(b[node_rows]))
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(criterion.leaf_value(a_sum, b_sum))
        cover.append(float(np.sum(cover_weights[node_rows])))
        return len(feature) - 1, a_sum, b_sum

    scratch = np.zeros(n_rows, dtype=bool)
    root, a_root, b_root = new_node(orders[0])
    stack = [(root, orders, 0, a_root, b_root)]
    while stack:
        node, node_orders, depth, a_sum, b_sum = stack.pop()
        if depth >= max_depth or not criterion.can_split(a_sum, b_sum, cover[node]):
            continue
        if subsample:
            candidates = np.sort(rng.choice(n_features, size=mtry, replace=False))
        else:
            candidates = range(n_features)
        best = _best_split(X, a, b, node_orders, candidates, criterion, a_sum, b_sum)
        if best is None:
            continue
        sorted_rows = node_orders[best.feature]
        values = X[sorted_rows, best.feature]
        cut = split_threshold(values[best.position], values[best.position + 1])

        scratch[sorted_rows[: best.position + 1]] = True
        left_orders = [order[scratch[order]] for order in node_orders]
        right_orders = [order[~scratch[order]] for order in node_orders]
        scratch[sorted_rows[: best.position + 1]] = False

        left_id, a_left, b_left = new_node(left_orders[0])
        right_id, a_right, b_right = new_node(right_orders[0])
        feature[node] = best.feature
        threshold[node] = float(cut)
        left[node] = left_id
        right[node] = right_id
        stack.append((right_id, right_orders, depth + 1, a_right, b_right))
        stack.append((left_id, left_orders, depth + 1, a_left, b_left))

    return Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=float),
        cover=np.asarray(cover, dtype=float),
    )
