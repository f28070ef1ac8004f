"""Seeded synthetic wearable streams with known hyperarousal events.

Each participant gets its own generator seeded from ``(seed, index)``:

* heart rate is an AR(1) process around ``baseline_hr``; inside an event the
  mean shifts by ``event_hr_shift`` and the innovation sd is multiplied by
  ``event_hr_sd_multiplier``;
* acceleration is zero-mean noise at a resting level, raised during exercise
  episodes and multiplied by ``event_activity_multiplier`` inside events;
* heart rate and the acceleration triple lose data in independent bursts
  (alternating geometric run lengths, missing fraction ``missing_rate``).

An EventMark is emitted at every event onset.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.signal import lfilter

from hyperarousal.data.types import EventMark, Recording, Sample
from hyperarousal.logger import Logger
from hyperarousal.utils.file_utils import atomic_write
from hyperarousal.utils.parallel import parallel_map

TRUTH_COLUMNS = ["participant_id", "event_start", "event_end"]
_MIN_HR = 30.0


class SynthConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    participants: int = Field(20, gt=0)
    duration: int = Field(14400, gt=0, description="seconds per participant")
    baseline_hr: float = Field(75.0, gt=0)
    hr_ar_coefficient: float = Field(0.9, gt=0, lt=1)
    hr_noise_sd: float = Field(3.0, gt=0)
    event_rate: float = Field(2.0, gt=0, description="events per hour")
    event_duration: int = Field(30, gt=0, description="seconds")
    event_hr_shift: float = 25.0
    event_hr_sd_multiplier: float = Field(2.0, ge=1)
    event_activity_multiplier: float = Field(0.3, gt=0, le=1)
    activity_episode_rate: float = Field(1.0, gt=0, description="episodes per hour")
    activity_episode_duration: float = Field(600.0, gt=0, description="mean seconds")
    activity_amplitude: float = Field(3.0, gt=0, description="m/s²")
    rest_acc_sd: float = Field(0.3, gt=0, description="m/s²")
    missing_rate: float = Field(0.05, ge=0, lt=1, description="0 gives complete streams")
    missing_burst_mean: float = Field(3.0, ge=1, description="samples")
    start_epoch: int = 1_600_000_000
    seed: int = 0


@dataclass(frozen=True)
class TruthInterval:
    participant_id: str
    event_start: int
    event_end: int


def participant_id(index: int) -> str:
    return f"P{index + 1:03d}"


def missing_mask(n: int, rate: float, burst_mean: float, rng: np.random.Generator) -> np.ndarray:
    """Alternating observed/missing runs with geometric lengths; missing fraction ``rate``."""
    mask = np.zeros(n, dtype=bool)
    if rate <= 0.0:
        return mask
    observed_mean = burst_mean * (1.0 - rate) / rate
    position = 0
    missing = bool(rng.random() < rate)
    while position < n:
        mean = burst_mean if missing else observed_mean
        length = int(rng.geometric(min(1.0, 1.0 / mean)))
        if missing:
            mask[position : position + length] = True
        position += length
        missing = not missing
    return mask


def _intervals(rng, count: int, n: int, length_of) -> np.ndarray:
    """Boolean mask covering ``count`` uniformly placed intervals."""
    mask = np.zeros(n, dtype=bool)
    for _ in range(count):
        length = max(1, min(n, length_of()))
        onset = int(rng.integers(0, n - length + 1))
        mask[onset : onset + length] = True
    return mask


def generate_participant(cfg: SynthConfig, index: int) -> Tuple[Recording, List[TruthInterval]]:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, index]))
    pid = participant_id(index)
    n = cfg.duration
    hours = n / 3600.0

    event_length = min(cfg.event_duration, n)
    event_count = int(rng.poisson(cfg.event_rate * hours))
    onsets = np.sort(rng.integers(0, n - event_length + 1, size=event_count))
    in_event = np.zeros(n, dtype=bool)
    for onset in onsets:
        in_event[onset : onset + event_length] = True

    innovation_sd = np.where(in_event, cfg.hr_noise_sd * cfg.event_hr_sd_multiplier, cfg.hr_noise_sd)
    innovations = rng.normal(0.0, 1.0, size=n) * innovation_sd
    phi = cfg.hr_ar_coefficient
    initial = rng.normal(0.0, cfg.hr_noise_sd / np.sqrt(1.0 - phi * phi))
    deviation, _ = lfilter([1.0], [1.0, -phi], innovations, zi=[phi * initial])
    hr = cfg.baseline_hr + deviation + cfg.event_hr_shift * in_event
    hr = np.maximum(hr, _MIN_HR)

    episode_count = int(rng.poisson(cfg.activity_episode_rate * hours))
    exercising = _intervals(
        rng,
        episode_count,
        n,
        lambda: int(round(rng.exponential(cfg.activity_episode_duration))),
    )
    level = cfg.rest_acc_sd + cfg.activity_amplitude * exercising
    level = np.where(in_event, level * cfg.event_activity_multiplier, level)
    acc = rng.normal(0.0, 1.0, size=(n, 3)) * level[:, None]

    hr_missing = missing_mask(n, cfg.missing_rate, cfg.missing_burst_mean, rng)
    acc_missing = missing_mask(n, cfg.missing_rate, cfg.missing_burst_mean, rng)

    hr = np.round(hr, 2)
    acc = np.round(acc, 4)
    timestamps = cfg.start_epoch + np.arange(n)
    samples = []
    for t in range(n):
        hr_value = None if hr_missing[t] else float(hr[t])
        if acc_missing[t]:
            samples.append(Sample(int(timestamps[t]), hr_value))
        else:
            ax, ay, az = acc[t]
            samples.append(Sample(int(timestamps[t]), hr_value, float(ax), float(ay), float(az)))
    events = tuple(EventMark(int(timestamps[onset])) for onset in onsets)
    truth = [
        TruthInterval(pid, int(timestamps[onset]), int(timestamps[onset]) + event_length)
        for onset in onsets
    ]
    return Recording(pid, tuple(samples), events), truth


def generate(cfg: SynthConfig, threads=None) -> Tuple[List[Recording], List[TruthInterval]]:
    """All participants, in index order; output depends only on ``cfg``."""
    results = parallel_map(
        lambda index: generate_participant(cfg, index), range(cfg.participants), threads
    )
    recordings = [recording for recording, _ in results]
    truth = [interval for _, intervals in results for interval in intervals]
    Logger.print_info(
        f"synthesized {len(recordings)} participants x {cfg.duration} s, {len(truth)} events"
    )
    return recordings, truth


def write_truth(truth: Sequence[TruthInterval], path):
    with atomic_write(path) as handle:
        handle.write(",".join(TRUTH_COLUMNS) + "\n")
        for interval in truth:
            handle.write(f"{interval.participant_id},{interval.event_start},{interval.event_end}\n")
