"""Pipeline stages. Each stage reads its declared inputs from the run
configuration's paths and writes its outputs atomically; none modifies an
input. All randomness derives from ``cfg.seed`` through named sub-seeds.
"""

from typing import Callable, Dict, List

import numpy as np

from hyperarousal.config import RunConfig
from hyperarousal.data.io import load_recordings, read_table, write_recordings
from hyperarousal.data.validation import validate_recording
from hyperarousal.errors import ConfigError, DataError, HyperarousalError, InsufficientDataError, StageError
from hyperarousal.evaluation.cv import (
    COMPARISON_COLUMNS,
    FOLDS,
    REPLICATIONS,
    CvComparison,
    compare_models,
    write_comparisons,
)
from hyperarousal.evaluation.report import evaluate_model, write_report
from hyperarousal.evaluation.roc import roc_auc, write_roc
from hyperarousal.explain.plots import dependence_features, render_plots
from hyperarousal.explain.summary import dependence, summarize, write_shap_values, write_summary
from hyperarousal.explain.treeshap import tree_shap_batch
from hyperarousal.features.dataset import Dataset, read_features, write_features
from hyperarousal.features.extraction import extract_all, write_rejections
from hyperarousal.logger import Logger
from hyperarousal.models.serialization import load_model, save_model
from hyperarousal.models.training import train
from hyperarousal.preprocess.imputation import calibrate_max_gap, write_calibration
from hyperarousal.preprocess.windowing import (
    preprocess_recording,
    read_window_dump,
    windows_from_dump,
    write_window_dump,
)
from hyperarousal.sampling import (
    ResampleSpec,
    ratio_sweep,
    read_split_manifest,
    split_by_participant,
    upsample_minority,
    write_split_manifest,
    write_sweep,
)
from hyperarousal.synth import generate, write_truth
from hyperarousal.utils.parallel import parallel_map
from hyperarousal.utils.performance_profiler import Timer, get_global_stats, is_timing_enabled
from hyperarousal.utils.seeding import derive_seed


def run_synth(cfg: RunConfig):
    synth_cfg = cfg.synth.model_copy(update={"seed": derive_seed(cfg.seed, "synth", cfg.synth.seed)})
    recordings, truth = generate(synth_cfg, cfg.threads)
    write_recordings(recordings, cfg.artifact("samples"), cfg.artifact("events"))
    write_truth(truth, cfg.artifact("truth"))


def _load_raw(cfg: RunConfig):
    recordings = load_recordings(cfg.artifact("samples"), cfg.artifact("events"))
    for recording in recordings:
        violations = validate_recording(recording)
        if violations:
            Logger.print_warning(
                f"{recording.participant_id}: {len(violations)} validation findings, "
                f"first: {violations[0]}"
            )
    return recordings


def run_preprocess(cfg: RunConfig):
    recordings = _load_raw(cfg)
    results = parallel_map(
        lambda recording: preprocess_recording(recording, cfg.imputation, cfg.windows),
        recordings,
        cfg.threads,
    )
    imputed = [recording for recording, _ in results]
    windows = [window for _, per_recording in results for window in per_recording]
    Logger.print_info(f"{len(windows)} windows from {len(recordings)} participants")
    write_recordings(imputed, cfg.artifact("imputed_samples"))
    write_window_dump(windows, cfg.artifact("windows"))


def run_features(cfg: RunConfig):
    imputed = load_recordings(cfg.artifact("imputed_samples"), cfg.artifact("events"))
    starts = read_window_dump(cfg.artifact("windows"))
    windows = []
    for recording in imputed:
        listed = starts.get(recording.participant_id)
        if listed:
            windows.extend(windows_from_dump(recording, listed, cfg.windows))
    vectors, rejected = extract_all(windows, cfg.threads)
    if not vectors:
        raise InsufficientDataError("no window survived feature extraction")
    write_features(vectors, cfg.artifact("features"))
    write_rejections(rejected, cfg.artifact("rejected_windows"))


def run_split(cfg: RunConfig):
    data = read_features(cfg.artifact("features"))
    split = split_by_participant(data, cfg.split.train_fraction, derive_seed(cfg.seed, "split"))
    write_split_manifest(split, cfg.artifact("split"))


def _split_parts(cfg: RunConfig):
    data = read_features(cfg.artifact("features"))
    roles = read_split_manifest(cfg.artifact("split"))
    unknown = set(data.participants()) - roles["train"] - roles["test"]
    if unknown:
        raise DataError(
            f"{cfg.artifact('split')}: participants missing from the split manifest: {sorted(unknown)}"
        )
    return data.for_participants(roles["train"]), data.for_participants(roles["test"])


def training_resample(cfg: RunConfig, *names) -> ResampleSpec:
    return cfg.resample.model_copy(update={"seed": derive_seed(cfg.seed, "resample", *names)})


def _sweep(cfg: RunConfig, train_part: Dataset):
    spec = cfg.spec_named(cfg.sweep.model)
    model_seed = derive_seed(cfg.seed, "sweep", "model")

    def evaluator(fitting: Dataset, validation: Dataset) -> float:
        model = train(spec, fitting, model_seed, threads=cfg.threads)
        try:
            return roc_auc(model.predict_proba_batch(validation.X), validation.y).auc
        except InsufficientDataError:
            Logger.print_warning("validation participants hold a single class; sweep metric is NaN")
            return float("nan")

    ratios = [
        ResampleSpec(
            majority_units=majority,
            minority_units=minority,
            seed=derive_seed(cfg.seed, "sweep", majority, minority),
        )
        for majority, minority in cfg.sweep.ratios
    ]
    rows = ratio_sweep(
        train_part, ratios, evaluator, cfg.seed, validation_fraction=cfg.sweep.validation_fraction
    )
    write_sweep(rows, cfg.artifact("ratio_sweep"))


def run_train(cfg: RunConfig):
    train_part, _ = _split_parts(cfg)
    if cfg.sweep.enabled:
        with Timer("train/ratio_sweep"):
            _sweep(cfg, train_part)
    fitting = upsample_minority(train_part, training_resample(cfg))
    for spec in cfg.models:
        with Timer(f"train/{spec.label}"):
            model = train(spec, fitting, derive_seed(cfg.seed, "train", spec.label), cfg.threads)
        save_model(model, cfg.model_path(spec.label))
        Logger.print_info(f"trained {spec.label}")


def run_compare(cfg: RunConfig):
    train_part, _ = _split_parts(cfg)
    _, comparisons = compare_models(
        cfg.models, train_part, derive_seed(cfg.seed, "compare"), cfg.resample, cfg.threads
    )
    write_comparisons(comparisons, cfg.artifact("comparisons"))


def _read_comparisons(cfg: RunConfig):
    path = cfg.artifact("comparisons")
    if not cfg.evaluation.compare or not path.exists():
        return []
    frame = read_table(path, COMPARISON_COLUMNS)
    return [
        CvComparison(
            row.model_a,
            row.model_b,
            np.full((REPLICATIONS, FOLDS), np.nan),
            float(row.t_statistic),
            float(row.p_value),
            row.degenerate.strip() == "true",
        )
        for row in frame.itertuples(index=False)
    ]


def run_evaluate(cfg: RunConfig):
    _, test_part = _split_parts(cfg)
    evaluations = []
    for spec in cfg.models:
        model = load_model(cfg.model_path(spec.label))
        evaluation = evaluate_model(model, test_part, cfg.regimes)
        write_roc(evaluation.curve, cfg.roc_path(spec.label))
        Logger.print_info(f"{spec.label}: test AUC {evaluation.auc:.4f}")
        evaluations.append(evaluation)
    write_report(evaluations, _read_comparisons(cfg), test_part, cfg.artifact("report"))


def run_explain(cfg: RunConfig, plots: bool = False):
    cfg.spec_named(cfg.explain.model)
    _, test_part = _split_parts(cfg)
    model = load_model(cfg.model_path(cfg.explain.model))
    subset = test_part.take(np.arange(min(len(test_part), cfg.explain.max_instances)))
    if len(subset) == 0:
        raise InsufficientDataError("no test windows to explain")
    batch = tree_shap_batch(model, subset.X)
    worst = float(np.max(np.abs(batch.base_value + batch.values.sum(axis=1) - batch.margins)))
    Logger.print_debug(f"TreeSHAP local accuracy: max deviation {worst:.3g}")
    summary = summarize(batch, subset.X)
    write_summary(summary, cfg.artifact("shap_summary"))
    instance_ids = [f"{pid}@{int(start)}" for pid, start in zip(subset.participant_ids, subset.window_starts)]
    write_shap_values(batch, subset.X, cfg.artifact("shap_values"), instance_ids)
    if plots or cfg.explain.plots:
        dependences = [dependence(batch, subset.X, name) for name in dependence_features(summary)]
        render_plots(summary, dependences, cfg.plots_dir)


def run_calibrate(cfg: RunConfig):
    """Gap calibration on the longest complete heart-rate stretch of one participant."""
    recordings = _load_raw(cfg)
    wanted = cfg.calibration.participant
    chosen = [r for r in recordings if wanted is None or r.participant_id == wanted]
    if not chosen:
        raise DataError(f"calibration participant {wanted!r} not found")
    best = np.zeros(0)
    for recording in chosen:
        hr = recording.channels.hr
        stretch = _longest_complete(hr, recording.channels.timestamps)
        if stretch.size > best.size:
            best = stretch
    calibration = calibrate_max_gap(
        best,
        cfg.calibration.gaps,
        cfg.calibration.trials,
        derive_seed(cfg.seed, "calibrate"),
        cfg.imputation,
    )
    write_calibration(calibration, cfg.artifact("calibration"))


def _longest_complete(values: np.ndarray, timestamps: np.ndarray) -> np.ndarray:
    """Longest run of consecutive seconds with a value present."""
    present = ~np.isnan(values)
    best_start, best_length, start = 0, 0, None
    for index in range(values.size + 1):
        contiguous = (
            index < values.size
            and present[index]
            and (start is None or timestamps[index] == timestamps[index - 1] + 1)
        )
        if contiguous:
            if start is None:
                start = index
            continue
        if start is not None and index - start > best_length:
            best_start, best_length = start, index - start
        start = index if index < values.size and present[index] else None
    return values[best_start : best_start + best_length]


STAGES: Dict[str, Callable[[RunConfig], None]] = {
    "synth": run_synth,
    "preprocess": run_preprocess,
    "features": run_features,
    "split": run_split,
    "train": run_train,
    "compare": run_compare,
    "evaluate": run_evaluate,
    "explain": run_explain,
    "calibrate": run_calibrate,
}


def pipeline_stages(cfg: RunConfig) -> List[str]:
    stages = ["synth"] if cfg.synth.enabled else []
    stages += ["preprocess", "features", "split", "train"]
    if cfg.evaluation.compare:
        stages.append("compare")
    stages.append("evaluate")
    if cfg.explain.enabled:
        stages.append("explain")
    return stages


# File named in a stage failure when the error itself carries no path.
STAGE_INPUTS = {
    "synth": "samples",
    "preprocess": "samples",
    "features": "imputed_samples",
    "split": "features",
    "train": "features",
    "compare": "features",
    "evaluate": "features",
    "explain": "features",
    "calibrate": "samples",
}


def _failing_path(name: str, cfg: RunConfig, error: BaseException):
    path = getattr(error, "path", None) or getattr(error, "filename", None)
    if path is None and not isinstance(error, ConfigError):
        path = cfg.artifact(STAGE_INPUTS[name])
    return path


def run_stage(name: str, cfg: RunConfig, **options):
    """Run one stage by name; failures are re-raised as StageError."""
    Logger.print_stage(name)
    try:
        with Timer(f"stage/{name}"):
            STAGES[name](cfg, **options)
    except StageError:
        raise
    except (HyperarousalError, OSError, ValueError) as error:
        raise StageError(name, _failing_path(name, cfg, error), error) from error


def run_pipeline(cfg: RunConfig, plots: bool = False):
    for name in pipeline_stages(cfg):
        run_stage(name, cfg, **({"plots": plots} if name == "explain" else {}))
    if is_timing_enabled():
        get_global_stats().print_summary()
