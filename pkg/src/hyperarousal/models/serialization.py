"""Model files: JSON documents ``{schema_version, kind, spec, feature_names,
training_seed, standardizer, parameters}``.

Floats are written by ``json`` in shortest round-trip form, so a loaded model
scores bit-identically to the saved one.
"""

import json
from pathlib import Path

from pydantic import ValidationError

from hyperarousal.errors import ModelFileError, SchemaVersionError
from hyperarousal.features.extraction import FEATURE_NAMES
from hyperarousal.models.base import TrainedModel
from hyperarousal.models.boosting import GradientBoostModel
from hyperarousal.models.forest import RandomForestModel
from hyperarousal.models.logistic import LogisticRegressionModel
from hyperarousal.models.specs import parse_spec, spec_to_dict
from hyperarousal.models.standardizer import Standardizer
from hyperarousal.models.svm import RbfSvmModel
from hyperarousal.utils.file_utils import atomic_write

SCHEMA_VERSION = 1

MODEL_CLASSES = {
    cls.kind: cls
    for cls in (RandomForestModel, GradientBoostModel, LogisticRegressionModel, RbfSvmModel)
}


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": model.kind,
        "spec": spec_to_dict(model.spec),
        "feature_names": list(model.feature_names),
        "training_seed": model.training_seed,
        "standardizer": model.standardizer.to_dict() if model.standardizer else None,
        "parameters": model.parameters_to_dict(),
    }


def model_from_dict(document: dict, source: str = "<memory>") -> TrainedModel:
    """Rebuild a model, raising ModelFileError on any structural problem."""
    if not isinstance(document, dict):
        raise ModelFileError(f"{source}: model file must hold a JSON object")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(version, SCHEMA_VERSION)
    try:
        kind = document["kind"]
        cls = MODEL_CLASSES.get(kind)
        if cls is None:
            raise ModelFileError(f"{source}: unknown model kind {kind!r}")
        spec = parse_spec(document["spec"])
        if spec.kind != kind:
            raise ModelFileError(f"{source}: spec kind {spec.kind!r} differs from {kind!r}")
        feature_names = list(document["feature_names"])
        if feature_names != list(FEATURE_NAMES):
            raise ModelFileError(f"{source}: unexpected feature order {feature_names}")
        standardizer = document.get("standardizer")
        return cls.from_parameters(
            spec,
            document["parameters"],
            feature_names=feature_names,
            training_seed=int(document["training_seed"]),
            standardizer=Standardizer.from_dict(standardizer) if standardizer else None,
        )
    except ModelFileError:
        raise
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ModelFileError(f"{source}: invalid model file: {exc}") from exc


def save_model(model: TrainedModel, path):
    with atomic_write(path) as handle:
        json.dump(model_to_dict(model), handle, sort_keys=True, allow_nan=False)
        handle.write("\n")


def load_model(path) -> TrainedModel:
    """Read a model file.

    Raises:
        FileNotFoundError: ``path`` does not exist.
        SchemaVersionError: Unsupported ``schema_version``.
        ModelFileError: Truncated or otherwise invalid content.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not a valid model file ({exc.msg} at line {exc.lineno})") from exc
    return model_from_dict(document, str(path))
