"""ROC/AUC, operating points, 5x2cv comparisons and the evaluation report."""

from .cv import (
    CvComparison,
    compare_models,
    cv5x2_from_differences,
    cv5x2_ttest,
    t5_two_sided_p,
    write_comparisons,
)
from .operating_point import (
    DEFAULT_REGIMES,
    ConfusionMatrix,
    Regime,
    accuracy,
    matrix_at_operating_point,
    matrix_at_threshold,
)
from .report import ModelEvaluation, evaluate_model, evaluate_scores, format_report, write_report
from .roc import RocCurve, roc_auc, write_roc

__all__ = [
    "DEFAULT_REGIMES",
    "ConfusionMatrix",
    "CvComparison",
    "ModelEvaluation",
    "Regime",
    "RocCurve",
    "accuracy",
    "compare_models",
    "cv5x2_from_differences",
    "cv5x2_ttest",
    "evaluate_model",
    "evaluate_scores",
    "format_report",
    "matrix_at_operating_point",
    "matrix_at_threshold",
    "roc_auc",
    "t5_two_sided_p",
    "write_comparisons",
    "write_report",
    "write_roc",
]
