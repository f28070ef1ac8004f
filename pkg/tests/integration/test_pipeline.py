from pathlib import Path
from unittest.mock import patch

import pytest
import yaml

from hyperarousal.config import parse_config
from hyperarousal.errors import StageError
from hyperarousal.evaluation import roc_auc
from hyperarousal.features.dataset import read_features
from hyperarousal.logger import Logger
from hyperarousal.models.serialization import load_model
from hyperarousal.pipeline import pipeline_stages, run_pipeline, run_stage
from hyperarousal.sampling import read_split_manifest

SMALL_RUN = {
    "seed": 11,
    "synth": {"enabled": True, "participants": 6, "duration": 3600, "event_rate": 8.0},
    "sweep": {"ratios": [[1, 1], [4, 3]], "model": "gradient_boost"},
    "models": [
        {"kind": "random_forest", "trees": 8, "max_depth": 8, "mtry": 3},
        {"kind": "gradient_boost", "trees": 8, "max_depth": 4},
        {"kind": "logistic_regression"},
        {"kind": "rbf_svm", "C": 1.0, "sigma": 3.0, "gamma_convention": "gaussian_width"},
    ],
    "explain": {"model": "gradient_boost", "max_instances": 50},
}

EXAMPLE_CONFIG = Path(__file__).resolve().parents[2] / "configs" / "example.yaml"

ARTIFACTS = [
    "samples.csv",
    "events.csv",
    "truth.csv",
    "imputed_samples.csv",
    "windows.csv",
    "features.csv",
    "rejected_windows.csv",
    "split.csv",
    "ratio_sweep.csv",
    "comparisons.csv",
    "evaluation_report.txt",
    "shap_summary.csv",
    "shap_values.csv",
    "models/gradient_boost.json",
    "models/rbf_svm.json",
    "roc_logistic_regression.csv",
]


def _run(out, threads):
    cfg = parse_config(dict(SMALL_RUN), {"out": str(out), "threads": threads})
    with patch.object(Logger, "print_info"), patch.object(Logger, "print_warning"):
        run_pipeline(cfg, plots=True)
    return cfg


@pytest.mark.slow
def test_pipeline_is_reproducible_across_thread_counts(tmp_path):
    """Test that two runs with one seed produce byte-identical artifacts."""
    first = tmp_path / "first"
    second = tmp_path / "second"
    cfg = _run(first, threads=1)
    _run(second, threads=3)

    assert pipeline_stages(cfg) == [
        "synth", "preprocess", "features", "split", "train", "compare", "evaluate", "explain"
    ]
    for name in ARTIFACTS:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    assert (first / "plots" / "shap_summary.svg").exists()

    report = (first / "evaluation_report.txt").read_text()
    for spec in cfg.models:
        assert f"== {spec.label} ==" in report
    assert "5x2cv" in report


def test_stage_failure_names_stage_and_path(tmp_path):
    cfg = parse_config(dict(SMALL_RUN), {"out": str(tmp_path)})
    with pytest.raises(StageError) as exc_info:
        run_stage("features", cfg)
    assert exc_info.value.stage == "features"
    assert exc_info.value.path == str(tmp_path / "imputed_samples.csv")


def _test_aucs(out, synth):
    """Held-out AUC per model after a full run of the example configuration."""
    data = yaml.safe_load(EXAMPLE_CONFIG.read_text())
    data["synth"].update(synth)
    data["sweep"]["enabled"] = False
    data["evaluation"]["compare"] = False
    data["explain"]["enabled"] = False
    cfg = parse_config(data, {"out": str(out)})
    with patch.object(Logger, "print_info"), patch.object(Logger, "print_warning"):
        run_pipeline(cfg)

    test_ids = read_split_manifest(cfg.artifact("split"))["test"]
    test = read_features(cfg.artifact("features"), test_ids)
    return {
        spec.label: roc_auc(load_model(cfg.model_path(spec.label)).predict_proba_batch(test.X), test.y).auc
        for spec in cfg.models
    }


@pytest.mark.slow
def test_planted_events_are_discriminated(tmp_path):
    """Test that gradient boosting finds planted events and is competitive with every model."""
    aucs = _test_aucs(
        tmp_path,
        {"event_hr_shift": 25.0, "event_hr_sd_multiplier": 2.0, "event_activity_multiplier": 0.3},
    )
    assert aucs["gradient_boost"] >= 0.90
    for label, auc in aucs.items():
        assert aucs["gradient_boost"] >= auc - 0.05, label


@pytest.mark.slow
def test_null_effect_gives_chance_auc(tmp_path):
    """Test that events with no physiological signature leave every model at chance."""
    aucs = _test_aucs(
        tmp_path,
        {"event_hr_shift": 0.0, "event_hr_sd_multiplier": 1.0, "event_activity_multiplier": 1.0},
    )
    for label, auc in aucs.items():
        assert auc == pytest.approx(0.5, abs=0.05), label
