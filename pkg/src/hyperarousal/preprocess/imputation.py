"""Kalman-smoother gap imputation for 1 Hz physiological channels.

Each channel is modelled as a local level (random walk plus observation
noise):

    level[t] = level[t-1] + w[t],   w ~ N(0, q)
    y[t]     = level[t] + v[t],     v ~ N(0, r)

Missing observations skip the measurement update; a Rauch-Tung-Striebel pass
then gives smoothed levels. Only maximal missing runs of length <= max_gap are
filled; longer runs stay missing and observed values are never touched.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import minimize_scalar

from hyperarousal.errors import DataError, InsufficientDataError
from hyperarousal.logger import Logger
from hyperarousal.utils.file_utils import atomic_write

_DIFFUSE_SCALE = 1e7
_LOG_RATIO_BOUNDS = (-12.0, 6.0)
_MIN_FIT_SAMPLES = 10


class ImputationConfig(BaseModel):
    """Gap-length rule and noise settings for Kalman imputation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    max_gap: int = Field(5, ge=0, description="longest missing run that is filled")
    mse_threshold: float = Field(15.0, gt=0, description="calibration cut-off")
    process_noise: float = Field(1.0, ge=0, description="fallback q")
    observation_noise: Optional[float] = Field(
        None, gt=0, description="fallback r; unset means sample variance"
    )
    fit_noise: bool = True
    mle_max_samples: int = Field(2000, ge=_MIN_FIT_SAMPLES)


@dataclass(frozen=True)
class NoiseParams:
    """Process (q) and observation (r) variances of the local-level model."""

    process: float
    observation: float
    fitted: bool


@dataclass(frozen=True)
class GapCalibration:
    """Per-gap mean squared error table and the max_gap it selects."""

    mse_by_gap: Dict[int, float]
    trials: int
    chosen_max_gap: int


def missing_runs(mask: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Start indices and lengths of the maximal True runs in ``mask``."""
    padded = np.concatenate(([0], mask.astype(np.int8), [0]))
    steps = np.diff(padded)
    starts = np.flatnonzero(steps == 1)
    ends = np.flatnonzero(steps == -1)
    return starts, ends - starts


def _longest_observed_stretch(values: np.ndarray, cap: int) -> np.ndarray:
    starts, lengths = missing_runs(~np.isnan(values))
    if len(lengths) == 0:
        return values[:0]
    best = int(np.argmax(lengths))
    start = int(starts[best])
    return values[start:start + min(int(lengths[best]), cap)]


def _concentrated_nll(log_ratio: float, observed: List[float]) -> Tuple[float, float]:
    """Negative log-likelihood with r concentrated out; returns (nll, r_hat).

    The first observation initialises the level (diffuse prior), so it does
    not contribute an innovation.
    """
    ratio = math.exp(log_ratio)
    level = observed[0]
    variance = 1.0
    sum_log_f = 0.0
    sum_scaled_sq = 0.0
    for y in observed[1:]:
        variance += ratio
        f = variance + 1.0
        innovation = y - level
        sum_log_f += math.log(f)
        sum_scaled_sq += innovation * innovation / f
        gain = variance / f
        level += gain * innovation
        variance -= gain * variance
    n = len(observed) - 1
    sigma2 = sum_scaled_sq / n
    if sigma2 <= 0.0:
        return math.inf, 0.0
    return 0.5 * (n * math.log(sigma2) + sum_log_f), sigma2


def _fallback_noise(values: np.ndarray, cfg: ImputationConfig) -> NoiseParams:
    observation = cfg.observation_noise
    if observation is None:
        observed = values[~np.isnan(values)]
        variance = float(np.var(observed, ddof=1)) if observed.size > 1 else 0.0
        observation = variance if variance > 0 and math.isfinite(variance) else 1.0
    return NoiseParams(float(cfg.process_noise), float(observation), fitted=False)


def fit_noise(values: np.ndarray, cfg: ImputationConfig) -> NoiseParams:
    """Maximum-likelihood (q, r) on the longest fully observed stretch.

    Falls back to ``cfg.process_noise`` and ``cfg.observation_noise`` (or the
    sample variance) when fitting is disabled, the stretch is shorter than
    ten samples, or the stretch is constant.
    """
    if not cfg.fit_noise:
        return _fallback_noise(values, cfg)
    stretch = _longest_observed_stretch(values, cfg.mle_max_samples)
    if stretch.size < _MIN_FIT_SAMPLES:
        return _fallback_noise(values, cfg)
    observed = stretch.tolist()
    result = minimize_scalar(
        lambda z: _concentrated_nll(z, observed)[0],
        bounds=_LOG_RATIO_BOUNDS,
        method="bounded",
        options={"xatol": 1e-4},
    )
    nll, sigma2 = _concentrated_nll(float(result.x), observed)
    if not math.isfinite(nll) or sigma2 <= 0:
        return _fallback_noise(values, cfg)
    return NoiseParams(math.exp(float(result.x)) * sigma2, sigma2, fitted=True)


def kalman_smooth(values: np.ndarray, noise: NoiseParams) -> np.ndarray:
    """Smoothed level for every position of a series with NaN gaps.

    The filter starts at the first observed value with a diffuse variance.
    A series with no observed values is returned unchanged.
    """
    observed_mask = ~np.isnan(values)
    if not observed_mask.any():
        return values.copy()
    q, r = noise.process, noise.observation
    y = values.tolist()
    present = observed_mask.tolist()
    n = len(y)
    level = y[int(np.argmax(observed_mask))]
    variance = _DIFFUSE_SCALE * max(r, 1e-12)

    level_pred = [0.0] * n
    var_pred = [0.0] * n
    level_filt = [0.0] * n
    var_filt = [0.0] * n
    for t in range(n):
        if t > 0:
            variance += q
        level_pred[t] = level
        var_pred[t] = variance
        if present[t]:
            gain = variance / (variance + r)
            level += gain * (y[t] - level)
            variance -= gain * variance
        level_filt[t] = level
        var_filt[t] = variance

    smoothed = level_filt[:]
    for t in range(n - 2, -1, -1):
        if var_pred[t + 1] > 0:
            gain = var_filt[t] / var_pred[t + 1]
            smoothed[t] = level_filt[t] + gain * (smoothed[t + 1] - level_pred[t + 1])
    return np.asarray(smoothed, dtype=float)


def impute_array(
    values: np.ndarray,
    cfg: ImputationConfig,
    noise: Optional[NoiseParams] = None,
) -> np.ndarray:
    """Fill missing runs of length <= ``cfg.max_gap`` in a NaN-coded array.

    Observed positions are copied bit-for-bit; ``noise`` skips the fit.
    """
    values = np.asarray(values, dtype=float)
    result = values.copy()
    mask = np.isnan(values)
    if values.size == 0 or not mask.any() or mask.all() or cfg.max_gap == 0:
        return result
    starts, lengths = missing_runs(mask)
    eligible = lengths <= cfg.max_gap
    if not eligible.any():
        return result
    if noise is None:
        noise = fit_noise(values, cfg)
    smoothed = kalman_smooth(values, noise)
    for start, length in zip(starts[eligible], lengths[eligible]):
        result[start:start + length] = smoothed[start:start + length]
    return result


def impute_series(
    values: Sequence[Optional[float]], cfg: ImputationConfig
) -> List[Optional[float]]:
    """Kalman-impute a sequence whose missing entries are None.

    Runs of at most ``cfg.max_gap`` missing values are replaced by smoothed
    estimates, longer runs stay None and present values are returned as given.
    An all-missing sequence comes back unchanged.
    """
    if len(values) == 0:
        raise InsufficientDataError("impute_series needs at least one value")
    array = np.array([np.nan if v is None else float(v) for v in values], dtype=float)
    filled = impute_array(array, cfg)
    return [
        original if original is not None else (None if math.isnan(new) else float(new))
        for original, new in zip(values, filled.tolist())
    ]


def calibrate_max_gap(
    complete_series: Sequence[float],
    candidate_gaps: Sequence[int],
    trials: int,
    seed: int,
    cfg: Optional[ImputationConfig] = None,
) -> GapCalibration:
    """Estimate imputation error per gap length and choose the largest safe gap.

    For every candidate k, ``trials`` interior runs of k values are dropped at
    random, imputed and compared with the truth. The chosen max_gap is the
    largest k whose mean squared error is strictly below ``cfg.mse_threshold``
    (0 when none is).
    """
    cfg = cfg or ImputationConfig()
    series = np.asarray(complete_series, dtype=float)
    gaps = sorted({int(k) for k in candidate_gaps})
    if not gaps:
        raise InsufficientDataError("calibrate_max_gap needs at least one candidate gap")
    if np.isnan(series).any():
        raise DataError("calibration series must not contain missing values")
    if trials < 1:
        raise InsufficientDataError("calibration needs at least one trial")
    n = series.size
    if gaps[0] < 1:
        raise InsufficientDataError(f"candidate gap {gaps[0]} must be >= 1")
    if gaps[-1] >= n:
        raise InsufficientDataError(
            f"candidate gap {gaps[-1]} is not shorter than the series ({n} values)"
        )
    if n < 10 * gaps[-1]:
        raise InsufficientDataError(
            f"series of {n} values is shorter than 10 x the largest gap ({gaps[-1]})"
        )

    noise = fit_noise(series, cfg)
    Logger.print_debug(
        f"calibration noise q={noise.process:.4g} r={noise.observation:.4g} "
        f"(fitted={noise.fitted})"
    )
    mse_by_gap: Dict[int, float] = {}
    for k in gaps:
        rng = np.random.default_rng([int(seed), k])
        gap_cfg = cfg.model_copy(update={"max_gap": k})
        errors = []
        for _ in range(trials):
            start = int(rng.integers(1, n - k))
            holed = series.copy()
            holed[start:start + k] = np.nan
            filled = impute_array(holed, gap_cfg, noise=noise)
            residual = filled[start:start + k] - series[start:start + k]
            errors.append(float(np.mean(residual * residual)))
        mse_by_gap[k] = float(np.mean(errors))

    below = [k for k in gaps if mse_by_gap[k] < cfg.mse_threshold]
    chosen = max(below) if below else 0
    Logger.print_info(f"calibrated max_gap={chosen} over candidates {gaps}")
    return GapCalibration(mse_by_gap=mse_by_gap, trials=trials, chosen_max_gap=chosen)


CALIBRATION_COLUMNS = ["gap", "mse", "trials"]


def write_calibration(calibration: GapCalibration, path):
    with atomic_write(path) as handle:
        handle.write(",".join(CALIBRATION_COLUMNS) + "\n")
        for gap in sorted(calibration.mse_by_gap):
            handle.write(f"{gap},{calibration.mse_by_gap[gap]!r},{calibration.trials}\n")
