"""Time-domain heart-rate and body-acceleration features per window."""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from hyperarousal.errors import FeatureExtractionError
from hyperarousal.logger import Logger
from hyperarousal.preprocess.windowing import Window
from hyperarousal.utils.file_utils import atomic_write
from hyperarousal.utils.parallel import parallel_map

FEATURE_NAMES: Tuple[str, ...] = (
    "hrmean",
    "hrmax",
    "hrmin",
    "hrsd",
    "hrrange",
    "linaccmean",
    "linaccmax",
    "linaccmin",
    "linaccrange",
)
HR_FEATURES = FEATURE_NAMES[:5]
ACC_FEATURES = FEATURE_NAMES[5:]

MIN_PRESENT_VALUES = 2


@dataclass(frozen=True)
class FeatureVector:
    """The nine window features plus label and provenance."""

    participant_id: str
    window_start: int
    hrmean: float
    hrmax: float
    hrmin: float
    hrsd: float
    hrrange: float
    linaccmean: float
    linaccmax: float
    linaccmin: float
    linaccrange: float
    label: int

    def values(self) -> Tuple[float, ...]:
        """Feature values in FEATURE_NAMES order."""
        return tuple(getattr(self, name) for name in FEATURE_NAMES)

    def as_array(self) -> np.ndarray:
        return np.array(self.values(), dtype=float)


def acc_magnitude(ax: float, ay: float, az: float) -> float:
    """Body acceleration magnitude sqrt(ax² + ay² + az²) in m/s²."""
    return math.sqrt(ax * ax + ay * ay + az * az)


def acc_magnitudes(acc: np.ndarray) -> np.ndarray:
    """Per-second magnitudes of an (n, 3) acceleration array (NaN stays NaN)."""
    return np.sqrt(np.sum(acc * acc, axis=1))


def _exact_mean(values: np.ndarray, low: float, high: float) -> float:
    # fsum is correctly rounded, so the result does not depend on sample order.
    mean = math.fsum(values.tolist()) / values.size
    return min(max(mean, low), high)


def _sample_sd(values: np.ndarray, mean: float) -> float:
    deviations = (values - mean).tolist()
    return math.sqrt(math.fsum(d * d for d in deviations) / (values.size - 1))


def extract_features(window: Window) -> FeatureVector:
    """Compute the nine features over the present (imputed) values of a window.

    Heart-rate deviation uses the n - 1 denominator; acceleration statistics
    are taken over per-second magnitudes.

    Raises:
        FeatureExtractionError: Fewer than two present heart-rate values or two
            present acceleration magnitudes.
    """
    hr = window.hr[~np.isnan(window.hr)]
    magnitude = acc_magnitudes(window.acc)
    magnitude = magnitude[~np.isnan(magnitude)]
    if hr.size < MIN_PRESENT_VALUES:
        raise FeatureExtractionError(
            window.participant_id,
            window.start,
            f"only {hr.size} present heart-rate values (need {MIN_PRESENT_VALUES})",
        )
    if magnitude.size < MIN_PRESENT_VALUES:
        raise FeatureExtractionError(
            window.participant_id,
            window.start,
            f"only {magnitude.size} present acceleration values "
            f"(need {MIN_PRESENT_VALUES})",
        )
    hrmax, hrmin = float(hr.max()), float(hr.min())
    accmax, accmin = float(magnitude.max()), float(magnitude.min())
    hrmean = _exact_mean(hr, hrmin, hrmax)
    accmean = _exact_mean(magnitude, accmin, accmax)
    return FeatureVector(
        participant_id=window.participant_id,
        window_start=window.start,
        hrmean=hrmean,
        hrmax=hrmax,
        hrmin=hrmin,
        hrsd=_sample_sd(hr, hrmean),
        hrrange=hrmax - hrmin,
        linaccmean=accmean,
        linaccmax=accmax,
        linaccmin=accmin,
        linaccrange=accmax - accmin,
        label=int(window.label),
    )


@dataclass(frozen=True)
class Rejection:
    participant_id: str
    window_start: int
    reason: str


def _try_extract(window: Window):
    try:
        return extract_features(window)
    except FeatureExtractionError as error:
        return Rejection(error.participant_id, error.window_start, error.reason)


def extract_all(
    windows: Sequence[Window], threads: Optional[int] = None
) -> Tuple[List[FeatureVector], List[Rejection]]:
    """Featurize windows in order; rejected windows are returned separately."""
    results = parallel_map(_try_extract, windows, threads)
    vectors = [r for r in results if isinstance(r, FeatureVector)]
    rejected = [r for r in results if isinstance(r, Rejection)]
    if rejected:
        Logger.print_warning(
            f"{len(rejected)} of {len(windows)} windows rejected during feature extraction"
        )
    return vectors, rejected


REJECTION_COLUMNS = ["participant_id", "window_start", "reason"]


def write_rejections(rejected: Sequence[Rejection], path):
    with atomic_write(path) as handle:
        handle.write(",".join(REJECTION_COLUMNS) + "\n")
        for r in rejected:
            handle.write(f"{r.participant_id},{r.window_start},{r.reason}\n")
