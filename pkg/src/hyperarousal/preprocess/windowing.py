"""Sliding-window segmentation, labeling and missingness filtering.

A recording is laid on a dense 1 Hz grid from its first to its last
timestamp (seconds without a sample row are missing in every channel), each
channel is imputed across the whole recording, and then 60 s windows are cut
every 30 s. Windows are half-open, [start, start + 60), and a window is
labeled hyperarousal iff an event mark falls inside it.
"""

import bisect
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hyperarousal.data.io import parse_timestamp, read_table
from hyperarousal.data.types import ChannelArrays, Recording, Sample, sample_from_values
from hyperarousal.logger import Logger
from hyperarousal.preprocess.imputation import ImputationConfig, impute_array
from hyperarousal.utils.file_utils import atomic_write

WINDOW_DUMP_COLUMNS = ["participant_id", "window_start", "label", "missing_fraction"]

# Value cells per second: heart rate and the acceleration triple.
CELLS_PER_SECOND = 2


class Label(IntEnum):
    NON_HYPERAROUSAL = 0
    HYPERAROUSAL = 1


class WindowConfig(BaseModel):
    """Window geometry and the missingness drop rule."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    length: int = Field(60, gt=0, description="window length in seconds")
    step: int = Field(30, gt=0, description="start-to-start advance in seconds")
    max_missing_fraction: float = Field(0.80, ge=0.0, le=1.0)


@dataclass(frozen=True, eq=False)
class Window:
    """A labeled slice of one recording's imputed 1 Hz grid.

    ``timestamps``, ``hr`` and ``acc`` are read-only views (NaN = missing).
    """

    participant_id: str
    start: int
    duration: int
    timestamps: np.ndarray
    hr: np.ndarray
    acc: np.ndarray
    label: Label
    missing_fraction: float

    @property
    def end(self) -> int:
        """Exclusive end of the covered interval."""
        return self.start + self.duration

    @property
    def samples(self) -> Tuple[Sample, ...]:
        return tuple(
            sample_from_values(t, h, a)
            for t, h, a in zip(self.timestamps.tolist(), self.hr, self.acc)
        )


def dense_grid(recording: Recording) -> ChannelArrays:
    """Channels on every second from the first to the last sample timestamp."""
    channels = recording.channels
    if channels.timestamps.size == 0:
        return channels
    first = int(channels.timestamps[0])
    span = int(channels.timestamps[-1]) - first + 1
    positions = channels.timestamps - first
    hr = np.full(span, np.nan)
    acc = np.full((span, 3), np.nan)
    hr[positions] = channels.hr
    acc[positions] = channels.acc
    return ChannelArrays(np.arange(first, first + span, dtype=np.int64), hr, acc)


def impute_channels(grid: ChannelArrays, cfg: ImputationConfig) -> ChannelArrays:
    """Impute heart rate and each acceleration axis independently."""
    hr = impute_array(grid.hr, cfg)
    acc = np.column_stack([impute_array(grid.acc[:, axis], cfg) for axis in range(3)])
    return ChannelArrays(grid.timestamps, hr, acc.reshape(grid.acc.shape))


def impute_recording(recording: Recording, cfg: ImputationConfig) -> Recording:
    """A copy of ``recording`` on its dense grid with short gaps imputed.

    Seconds that are still missing in every channel are omitted, except the
    first and last, which keep the recording's span.
    """
    return _recording_from_grid(recording, impute_channels(dense_grid(recording), cfg))


def _recording_from_grid(recording: Recording, channels: ChannelArrays) -> Recording:
    keep = ~(np.isnan(channels.hr) & np.isnan(channels.acc).any(axis=1))
    if keep.size:
        keep[0] = keep[-1] = True
    samples = tuple(
        sample_from_values(t, h, a)
        for t, h, a in zip(
            channels.timestamps[keep].tolist(), channels.hr[keep], channels.acc[keep]
        )
    )
    return Recording(recording.participant_id, samples, recording.events)


def window_starts(first: int, last: int, window_cfg: WindowConfig) -> range:
    """Starts s = first + k*step with s + length <= last + 1."""
    return range(first, last + 2 - window_cfg.length, window_cfg.step)


def label_for(event_times: Sequence[int], start: int, length: int) -> Label:
    """HYPERAROUSAL iff some event lies in [start, start + length)."""
    index = bisect.bisect_left(event_times, start)
    if index < len(event_times) and event_times[index] < start + length:
        return Label.HYPERAROUSAL
    return Label.NON_HYPERAROUSAL


def _cut(
    participant_id: str,
    grid: ChannelArrays,
    event_times: Sequence[int],
    start: int,
    window_cfg: WindowConfig,
) -> Window:
    offset = start - int(grid.timestamps[0])
    stop = offset + window_cfg.length
    hr = grid.hr[offset:stop]
    acc = grid.acc[offset:stop]
    missing = int(np.isnan(hr).sum()) + int(np.isnan(acc).any(axis=1).sum())
    return Window(
        participant_id=participant_id,
        start=start,
        duration=window_cfg.length,
        timestamps=grid.timestamps[offset:stop],
        hr=hr,
        acc=acc,
        label=label_for(event_times, start, window_cfg.length),
        missing_fraction=missing / (CELLS_PER_SECOND * window_cfg.length),
    )


def slice_windows(
    recording: Recording,
    grid: ChannelArrays,
    window_cfg: WindowConfig,
    starts: Optional[Iterable[int]] = None,
) -> List[Window]:
    """Cut windows from an already imputed grid, dropping mostly-missing ones.

    ``starts`` restricts the cut to the given window starts (used when
    rebuilding windows from a dump).
    """
    if grid.timestamps.size == 0:
        return []
    first, last = int(grid.timestamps[0]), int(grid.timestamps[-1])
    event_times = recording.event_times.tolist()
    if starts is None:
        starts = window_starts(first, last, window_cfg)
    windows = []
    dropped = 0
    for start in starts:
        if start < first or start + window_cfg.length > last + 1:
            continue
        window = _cut(recording.participant_id, grid, event_times, start, window_cfg)
        if window.missing_fraction > window_cfg.max_missing_fraction:
            dropped += 1
            continue
        windows.append(window)
    if dropped:
        Logger.print_debug(
            f"{recording.participant_id}: dropped {dropped} windows over "
            f"{window_cfg.max_missing_fraction:.0%} missing"
        )
    return windows


def make_windows(
    recording: Recording,
    cfg: ImputationConfig,
    window_cfg: Optional[WindowConfig] = None,
) -> List[Window]:
    """Impute a recording and cut it into labeled sliding windows.

    A recording shorter than one window yields an empty list.
    """
    window_cfg = window_cfg or WindowConfig()
    grid = impute_channels(dense_grid(recording), cfg)
    return slice_windows(recording, grid, window_cfg)


def preprocess_recording(
    recording: Recording,
    cfg: ImputationConfig,
    window_cfg: Optional[WindowConfig] = None,
) -> Tuple[Recording, List[Window]]:
    """Imputed copy of ``recording`` and its windows, from a single imputation pass."""
    window_cfg = window_cfg or WindowConfig()
    grid = impute_channels(dense_grid(recording), cfg)
    return _recording_from_grid(recording, grid), slice_windows(recording, grid, window_cfg)


def windows_from_dump(
    imputed: Recording, starts: Iterable[int], window_cfg: Optional[WindowConfig] = None
) -> List[Window]:
    """Rebuild the listed windows from an already imputed recording."""
    window_cfg = window_cfg or WindowConfig()
    return slice_windows(imputed, dense_grid(imputed), window_cfg, starts=sorted(starts))


def write_window_dump(windows: Iterable[Window], path):
    """Write ``participant_id,window_start,label,missing_fraction`` rows."""
    with atomic_write(path) as handle:
        handle.write(",".join(WINDOW_DUMP_COLUMNS) + "\n")
        for window in windows:
            handle.write(
                f"{window.participant_id},{window.start},{int(window.label)},"
                f"{window.missing_fraction!r}\n"
            )


def read_window_dump(path) -> Dict[str, List[int]]:
    """Window starts per participant from a windows dump file."""
    frame = read_table(path, WINDOW_DUMP_COLUMNS)
    starts: Dict[str, List[int]] = {}
    for index, row in enumerate(frame.itertuples(index=False)):
        start = parse_timestamp(row.window_start, path, index + 2)
        starts.setdefault(row.participant_id.strip(), []).append(start)
    return starts
