"""Domain types for wearable recordings.

Missing values are ``None`` in memory and empty fields on disk; there are no
sentinel numbers. All types are frozen and safe to share between threads.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class Sample:
    """One 1 Hz reading.

    Attributes:
        timestamp: Integer epoch seconds, unique within a recording.
        hr: Heart rate in bpm, or None when missing.
        acc_x, acc_y, acc_z: Acceleration components in m/s², all present or
            all None.
    """

    timestamp: int
    hr: Optional[float] = None
    acc_x: Optional[float] = None
    acc_y: Optional[float] = None
    acc_z: Optional[float] = None

    @property
    def acc(self) -> Optional[Tuple[float, float, float]]:
        """The acceleration triple, or None unless all three are present."""
        if self.acc_x is None or self.acc_y is None or self.acc_z is None:
            return None
        return (self.acc_x, self.acc_y, self.acc_z)


@dataclass(frozen=True)
class EventMark:
    """A self-reported hyperarousal event at ``timestamp`` (epoch seconds)."""

    timestamp: int


@dataclass(frozen=True)
class Recording:
    """One participant's sample stream and event marks.

    Samples are in strictly increasing timestamp order and events in
    non-decreasing order when produced by ``load_recordings`` or ``generate``.
    """

    participant_id: str
    samples: Tuple[Sample, ...] = field(default_factory=tuple)
    events: Tuple[EventMark, ...] = field(default_factory=tuple)

    @property
    def start(self) -> Optional[int]:
        return self.samples[0].timestamp if self.samples else None

    @property
    def end(self) -> Optional[int]:
        return self.samples[-1].timestamp if self.samples else None

    @cached_property
    def channels(self) -> "ChannelArrays":
        """Column view of the samples with NaN for missing values."""
        return ChannelArrays.from_samples(self.samples)

    @cached_property
    def event_times(self) -> np.ndarray:
        return np.array([event.timestamp for event in self.events], dtype=np.int64)


def _nan_if_none(value: Optional[float]) -> float:
    return np.nan if value is None else float(value)


@dataclass(frozen=True)
class ChannelArrays:
    """Per-channel numpy columns of a sample stream (NaN = missing).

    ``acc`` has shape (n, 3) in x, y, z order.
    """

    timestamps: np.ndarray
    hr: np.ndarray
    acc: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "ChannelArrays":
        n = len(samples)
        timestamps = np.fromiter((s.timestamp for s in samples), dtype=np.int64, count=n)
        hr = np.fromiter((_nan_if_none(s.hr) for s in samples), dtype=float, count=n)
        acc = np.empty((n, 3), dtype=float)
        for column, name in enumerate(("acc_x", "acc_y", "acc_z")):
            acc[:, column] = np.fromiter(
                (_nan_if_none(getattr(s, name)) for s in samples), dtype=float, count=n
            )
        return cls(timestamps=timestamps, hr=hr, acc=acc)


def sample_from_values(timestamp: int, hr: float, acc_row) -> Sample:
    """Build a Sample from float columns, turning NaN into None."""
    hr_value = None if np.isnan(hr) else float(hr)
    if np.isnan(acc_row).any():
        return Sample(int(timestamp), hr_value)
    return Sample(
        int(timestamp), hr_value, float(acc_row[0]), float(acc_row[1]), float(acc_row[2])
    )
