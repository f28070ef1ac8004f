"""Declarative run configuration (one YAML file) and its validation.

Every section is a frozen pydantic model; parsing or validation failures are
raised as ConfigError so the CLI can exit with status 2.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from hyperarousal.errors import ConfigError
from hyperarousal.evaluation.operating_point import DEFAULT_REGIMES, Regime
from hyperarousal.models.specs import ModelSpec, default_specs
from hyperarousal.preprocess.imputation import ImputationConfig
from hyperarousal.preprocess.windowing import WindowConfig
from hyperarousal.sampling import DEFAULT_SWEEP_RATIOS, ResampleSpec
from hyperarousal.synth import SynthConfig

ARTIFACTS = {
    "samples": "samples.csv",
    "events": "events.csv",
    "truth": "truth.csv",
    "imputed_samples": "imputed_samples.csv",
    "windows": "windows.csv",
    "features": "features.csv",
    "rejected_windows": "rejected_windows.csv",
    "split": "split.csv",
    "ratio_sweep": "ratio_sweep.csv",
    "comparisons": "comparisons.csv",
    "report": "evaluation_report.txt",
    "shap_summary": "shap_summary.csv",
    "shap_values": "shap_values.csv",
    "calibration": "calibration.csv",
}


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class PathsConfig(_Section):
    """``out`` holds every artifact; ``samples``/``events`` may point at external inputs."""

    out: str = "run"
    samples: Optional[str] = None
    events: Optional[str] = None


class SynthSection(SynthConfig):
    enabled: bool = False


class SplitConfig(_Section):
    train_fraction: float = Field(0.7, gt=0, lt=1)


class SweepConfig(_Section):
    enabled: bool = True
    ratios: List[Tuple[int, int]] = Field(default_factory=lambda: list(DEFAULT_SWEEP_RATIOS))
    model: str = "gradient_boost"
    validation_fraction: float = Field(0.3, gt=0, lt=1)

    @field_validator("ratios")
    @classmethod
    def _positive_units(cls, ratios):
        for majority, minority in ratios:
            if majority <= 0 or minority <= 0:
                raise ValueError(f"ratio {majority}:{minority} must have positive units")
        return ratios


class EvaluationConfig(_Section):
    compare: bool = True


class ExplainConfig(_Section):
    enabled: bool = True
    model: str = "gradient_boost"
    max_instances: int = Field(500, gt=0)
    plots: bool = False


class CalibrationConfig(_Section):
    gaps: List[int] = Field(default_factory=lambda: list(range(1, 11)))
    trials: int = Field(200, gt=0)
    participant: Optional[str] = None


class RunConfig(_Section):
    seed: int = 0
    threads: Optional[int] = Field(None, gt=0)
    paths: PathsConfig = Field(default_factory=PathsConfig)
    synth: SynthSection = Field(default_factory=SynthSection)
    imputation: ImputationConfig = Field(default_factory=ImputationConfig)
    windows: WindowConfig = Field(default_factory=WindowConfig)
    split: SplitConfig = Field(default_factory=SplitConfig)
    resample: ResampleSpec = Field(default_factory=ResampleSpec)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    models: List[ModelSpec] = Field(default_factory=default_specs)
    regimes: List[Regime] = Field(default_factory=lambda: list(DEFAULT_REGIMES))
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    explain: ExplainConfig = Field(default_factory=ExplainConfig)
    calibration: CalibrationConfig = Field(default_factory=CalibrationConfig)

    @model_validator(mode="after")
    def _check(self):
        labels = [spec.label for spec in self.models]
        if not labels:
            raise ValueError("models: at least one model is required")
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise ValueError(f"models: duplicate model names {duplicates}")
        if self.regimes == []:
            raise ValueError("regimes: at least one regime is required")
        paths = self.artifact_paths()
        seen: Dict[Path, str] = {}
        for name, path in paths.items():
            resolved = path.resolve()
            if resolved in seen:
                raise ValueError(f"paths: {name} and {seen[resolved]} both resolve to {path}")
            seen[resolved] = name
        return self

    @property
    def out_dir(self) -> Path:
        return Path(self.paths.out)

    def artifact(self, name: str) -> Path:
        if name == "samples" and self.paths.samples:
            return Path(self.paths.samples)
        if name == "events" and self.paths.events:
            return Path(self.paths.events)
        return self.out_dir / ARTIFACTS[name]

    def artifact_paths(self) -> Dict[str, Path]:
        paths = {name: self.artifact(name) for name in ARTIFACTS}
        for spec in self.models:
            paths[f"model {spec.label}"] = self.model_path(spec.label)
            paths[f"roc {spec.label}"] = self.roc_path(spec.label)
        return paths

    def model_path(self, label: str) -> Path:
        return self.out_dir / "models" / f"{label}.json"

    def roc_path(self, label: str) -> Path:
        return self.out_dir / f"roc_{label}.csv"

    @property
    def plots_dir(self) -> Path:
        return self.out_dir / "plots"

    def spec_named(self, label: str):
        for spec in self.models:
            if spec.label == label:
                return spec
        raise ConfigError(f"no model named {label!r} in models ({[s.label for s in self.models]})")


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: Optional[dict], overrides: Optional[dict] = None) -> RunConfig:
    """Validate a mapping, applying top-level ``overrides`` (seed, threads, out)."""
    data = dict(data or {})
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "out":
            paths = dict(data.get("paths") or {})
            paths["out"] = str(value)
            data["paths"] = paths
        else:
            data[key] = value
    try:
        return RunConfig.model_validate(data)
    except ValidationError as error:
        raise ConfigError(f"invalid configuration: {_describe(error)}") from error


def load_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    """Read a YAML run configuration (defaults when ``path`` is None).

    Raises:
        FileNotFoundError: ``path`` does not exist.
        ConfigError: The YAML does not parse or does not validate.
    """
    data = None
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as error:
            raise ConfigError(f"{path}: not valid YAML: {error}") from error
        if data is not None and not isinstance(data, dict):
            raise ConfigError(f"{path}: configuration must be a mapping")
    return parse_config(data, overrides)
