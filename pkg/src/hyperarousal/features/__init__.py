"""Window feature extraction and feature datasets."""

from .dataset import Dataset, read_features, write_features
from .extraction import (
    ACC_FEATURES,
    FEATURE_NAMES,
    HR_FEATURES,
    FeatureVector,
    Rejection,
    acc_magnitude,
    extract_all,
    extract_features,
    write_rejections,
)

__all__ = [
    "ACC_FEATURES",
    "FEATURE_NAMES",
    "HR_FEATURES",
    "Dataset",
    "FeatureVector",
    "Rejection",
    "acc_magnitude",
    "extract_all",
    "extract_features",
    "read_features",
    "write_features",
    "write_rejections",
]
