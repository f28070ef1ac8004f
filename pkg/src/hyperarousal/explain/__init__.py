"""TreeSHAP attributions and their summary/dependence exports."""

from .summary import (
    DependenceData,
    FeatureSummary,
    SummaryData,
    dependence,
    summarize,
    write_shap_values,
    write_summary,
)
from .treeshap import ShapBatch, ShapExplanation, tree_contributions, tree_shap, tree_shap_batch

__all__ = [
    "DependenceData",
    "FeatureSummary",
    "ShapBatch",
    "ShapExplanation",
    "SummaryData",
    "dependence",
    "summarize",
    "tree_contributions",
    "tree_shap",
    "tree_shap_batch",
    "write_shap_values",
    "write_summary",
]
