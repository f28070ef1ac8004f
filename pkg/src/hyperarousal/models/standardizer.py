"""Per-feature standardization estimated on training data only."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from hyperarousal.logger import Logger


@dataclass(frozen=True, eq=False)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray, feature_names: Sequence[str] = ()) -> "Standardizer":
        """Population mean and deviation per column; constant columns get 1."""
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        constant = ~(std > 0)
        for column in np.flatnonzero(constant):
            name = feature_names[column] if column < len(feature_names) else column
            Logger.print_warning(f"feature {name} is constant in training data; using deviation 1")
        std = np.where(constant, 1.0, std)
        return cls(mean=mean, std=std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Standardizer":
        return cls(
            mean=np.asarray(data["mean"], dtype=float),
            std=np.asarray(data["std"], dtype=float),
        )
