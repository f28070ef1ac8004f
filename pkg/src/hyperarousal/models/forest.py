"""Random forest of bagged Gini trees."""

from typing import Optional

import numpy as np

from hyperarousal.logger import Logger
from hyperarousal.models.base import TreeEnsembleModel, clamped_logit
from hyperarousal.models.specs import RandomForestSpec
from hyperarousal.models.tree import GiniCriterion, Tree, grow_tree
from hyperarousal.utils.parallel import parallel_map
from hyperarousal.utils.seeding import derive_seed


class RandomForestModel(TreeEnsembleModel):
    """Score = mean leaf positive fraction; margin = clamped logit of the score."""

    kind = "random_forest"

    @property
    def margin_offset(self) -> float:
        return 0.0

    @property
    def tree_weight(self) -> float:
        return 1.0 / len(self.trees)

    def mean_fraction(self, X: np.ndarray) -> np.ndarray:
        return np.clip(self.raw_sum(X), 0.0, 1.0)

    def _margins(self, Z):
        return clamped_logit(self.mean_fraction(Z))

    def _probabilities(self, Z, margins):
        return self.mean_fraction(Z)

    def parameters_to_dict(self) -> dict:
        return {"trees": [tree.to_dict() for tree in self.trees]}

    @classmethod
    def from_parameters(cls, spec, parameters, feature_names, training_seed, standardizer):
        trees = [Tree.from_dict(tree) for tree in parameters["trees"]]
        return cls(
            spec,
            trees,
            feature_names=feature_names,
            training_seed=training_seed,
            standardizer=standardizer,
        )


def bootstrap_weights(n_rows: int, rng: np.random.Generator) -> np.ndarray:
    """How many times each row appears in one bootstrap draw of size n_rows."""
    draws = rng.integers(0, n_rows, size=n_rows)
    return np.bincount(draws, minlength=n_rows).astype(float)


def train_forest(
    spec: RandomForestSpec,
    X: np.ndarray,
    y: np.ndarray,
    seed: int,
    feature_names,
    threads: Optional[int] = None,
) -> RandomForestModel:
    """Grow ``spec.trees`` trees; tree ``i`` draws from ``derive_seed(seed, "tree", i)``."""
    n_rows, n_features = X.shape
    mtry = spec.effective_mtry(n_features)
    if spec.mtry > n_features:
        Logger.print_debug(f"mtry {spec.mtry} clamped to {n_features} features")
    labels = np.asarray(y, dtype=float)
    criterion = GiniCriterion(spec.min_samples_split)

    def grow(index: int) -> Tree:
        rng = np.random.default_rng(derive_seed(seed, "tree", index))
        if spec.bootstrap:
            weights = bootstrap_weights(n_rows, rng)
        else:
            weights = np.ones(n_rows)
        return grow_tree(
            X,
            a=weights,
            b=weights * labels,
            cover_weights=weights,
            criterion=criterion,
            max_depth=spec.max_depth,
            mtry=mtry,
            rng=rng,
        )

    trees = parallel_map(grow, range(spec.trees), threads)
    Logger.print_debug(
        f"random forest: {len(trees)} trees, max depth reached "
        f"{max(tree.depth() for tree in trees)}"
    )
    return RandomForestModel(spec, trees, feature_names=feature_names, training_seed=seed)
