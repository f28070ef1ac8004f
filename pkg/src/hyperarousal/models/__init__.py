"""From-scratch binary classifiers, their specs and model files."""

from .base import TrainedModel, TreeEnsembleModel, clamped_logit
from .boosting import GradientBoostModel
from .forest import RandomForestModel
from .logistic import LogisticRegressionModel
from .serialization import SCHEMA_VERSION, load_model, save_model
from .specs import (
    GradientBoostSpec,
    LogisticRegressionSpec,
    ModelSpec,
    RandomForestSpec,
    RbfSvmSpec,
    default_specs,
    parse_spec,
)
from .standardizer import Standardizer
from .svm import RbfSvmModel
from .training import decision_function, predict_proba, predict_proba_batch, train
from .tree import Tree

__all__ = [
    "SCHEMA_VERSION",
    "GradientBoostModel",
    "GradientBoostSpec",
    "LogisticRegressionModel",
    "LogisticRegressionSpec",
    "ModelSpec",
    "RandomForestModel",
    "RandomForestSpec",
    "RbfSvmModel",
    "RbfSvmSpec",
    "Standardizer",
    "TrainedModel",
    "Tree",
    "TreeEnsembleModel",
    "clamped_logit",
    "decision_function",
    "default_specs",
    "load_model",
    "parse_spec",
    "predict_proba",
    "predict_proba_batch",
    "save_model",
    "train",
]
