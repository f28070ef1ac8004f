"""Hyperparameter specifications for the four classifier families."""

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter


class _SpecBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Optional[str] = Field(
        None, description="artifact name; defaults to the family kind"
    )

    @property
    def label(self) -> str:
        return self.name or self.kind  # type: ignore[attr-defined]


class RandomForestSpec(_SpecBase):
    """Bagged Gini trees; mtry is clamped to the number of features."""

    kind: Literal["random_forest"] = "random_forest"
    trees: int = Field(50, gt=0)
    max_depth: int = Field(28, gt=0)
    mtry: int = Field(10, gt=0)
    bootstrap: bool = True
    min_samples_split: int = Field(2, ge=2)

    def effective_mtry(self, n_features: int) -> int:
        return min(self.mtry, n_features)


class GradientBoostSpec(_SpecBase):
    """Newton boosting on logistic loss with xgboost-style leaf weights."""

    kind: Literal["gradient_boost"] = "gradient_boost"
    trees: int = Field(50, gt=0)
    max_depth: int = Field(37, gt=0)
    learning_rate: float = Field(0.3, ge=0)
    l2_leaf_penalty: float = Field(1.0, ge=0)
    min_child_weight: float = Field(1.0, ge=0)
    base_margin: Optional[float] = Field(
        None, description="starting log-odds; unset means logit of the positive rate"
    )


class LogisticRegressionSpec(_SpecBase):
    """L2-penalized logistic regression on standardized features."""

    kind: Literal["logistic_regression"] = "logistic_regression"
    lam: float = Field(0.03240, ge=0, alias="lambda")
    tol: float = Field(1e-6, gt=0)
    max_iter: int = Field(100, gt=0)

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)


class RbfSvmSpec(_SpecBase):
    """Soft-margin SVM with an RBF kernel, trained by SMO, Platt-calibrated."""

    kind: Literal["rbf_svm"] = "rbf_svm"
    C: float = Field(5.0, gt=0)
    sigma: float = Field(12.0, gt=0)
    gamma_convention: Literal["kernlab", "gaussian_width"] = "kernlab"
    tol: float = Field(1e-3, gt=0)
    max_iter: int = Field(200_000, gt=0)
    cache_mb: int = Field(256, gt=0)

    @property
    def gamma(self) -> float:
        """Kernel coefficient in k(x, z) = exp(-gamma * ||x - z||²)."""
        if self.gamma_convention == "kernlab":
            return self.sigma
        return 1.0 / (2.0 * self.sigma * self.sigma)


ModelSpec = Annotated[
    Union[RandomForestSpec, GradientBoostSpec, LogisticRegressionSpec, RbfSvmSpec],
    Field(discriminator="kind"),
]

_spec_adapter = TypeAdapter(ModelSpec)


def parse_spec(data: dict):
    """Validate a mapping (with a ``kind`` key) into the matching spec class."""
    return _spec_adapter.validate_python(data)


def spec_to_dict(spec) -> dict:
    return spec.model_dump(mode="json", by_alias=True)


def default_specs():
    """The four configurations with their published hyperparameters."""
    return [
        RandomForestSpec(),
        GradientBoostSpec(),
        LogisticRegressionSpec(),
        RbfSvmSpec(),
    ]
