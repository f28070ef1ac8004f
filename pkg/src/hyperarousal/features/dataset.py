"""Column-oriented feature datasets and the feature file.

Feature file header:
``participant_id,window_start,hrmean,hrmax,hrmin,hrsd,hrrange,linaccmean,linaccmax,linaccmin,linaccrange,label``
with reals written at 17 significant digits.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from hyperarousal.data.io import parse_timestamp, read_table
from hyperarousal.errors import MalformedRowError
from hyperarousal.features.extraction import FEATURE_NAMES, FeatureVector
from hyperarousal.utils.file_utils import atomic_write

FEATURE_FILE_COLUMNS = ["participant_id", "window_start", *FEATURE_NAMES, "label"]


def format_real(value: float) -> str:
    """17 significant digits: enough to read back the identical double."""
    return format(float(value), ".17g")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix (rows in FEATURE_NAMES column order) with labels and provenance."""

    X: np.ndarray
    y: np.ndarray
    participant_ids: np.ndarray
    window_starts: np.ndarray

    def __post_init__(self):
        n = self.X.shape[0]
        if self.X.ndim != 2 or self.X.shape[1] != len(FEATURE_NAMES):
            raise ValueError(f"X must have shape (n, {len(FEATURE_NAMES)})")
        if not (len(self.y) == len(self.participant_ids) == len(self.window_starts) == n):
            raise ValueError("dataset columns differ in length")

    def __len__(self) -> int:
        return int(self.X.shape[0])

    @classmethod
    def from_vectors(cls, vectors: Iterable[FeatureVector]) -> "Dataset":
        vectors = list(vectors)
        X = np.array([v.values() for v in vectors], dtype=float).reshape(
            len(vectors), len(FEATURE_NAMES)
        )
        return cls(
            X=X,
            y=np.array([v.label for v in vectors], dtype=np.int64),
            participant_ids=np.array([v.participant_id for v in vectors], dtype=object),
            window_starts=np.array([v.window_start for v in vectors], dtype=np.int64),
        )

    def to_vectors(self) -> List[FeatureVector]:
        return [
            FeatureVector(
                str(pid), int(start), *(float(value) for value in row), int(label)
            )
            for pid, start, row, label in zip(
                self.participant_ids, self.window_starts, self.X, self.y
            )
        ]

    def take(self, indices: Sequence[int]) -> "Dataset":
        """Rows at ``indices`` (repeats allowed), in the given order."""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            X=self.X[indices],
            y=self.y[indices],
            participant_ids=self.participant_ids[indices],
            window_starts=self.window_starts[indices],
        )

    def for_participants(self, participants: Iterable[str]) -> "Dataset":
        """Rows whose participant is in ``participants``, in original order."""
        wanted = set(participants)
        mask = np.array([pid in wanted for pid in self.participant_ids], dtype=bool)
        return self.take(np.flatnonzero(mask))

    def participants(self) -> List[str]:
        """Distinct participant ids, sorted."""
        return sorted({str(pid) for pid in self.participant_ids})

    def class_counts(self) -> dict:
        return {0: int(np.sum(self.y == 0)), 1: int(np.sum(self.y == 1))}

    def has_both_classes(self) -> bool:
        counts = self.class_counts()
        return counts[0] > 0 and counts[1] > 0

    def identical_to(self, other: "Dataset") -> bool:
        """Bitwise equality of every column."""
        return (
            self.X.shape == other.X.shape
            and self.X.tobytes() == other.X.tobytes()
            and np.array_equal(self.y, other.y)
            and list(self.participant_ids) == list(other.participant_ids)
            and np.array_equal(self.window_starts, other.window_starts)
        )


def write_features(data, path):
    """Write a Dataset (or FeatureVector list) to the feature file."""
    if not isinstance(data, Dataset):
        data = Dataset.from_vectors(data)
    with atomic_write(path) as handle:
        handle.write(",".join(FEATURE_FILE_COLUMNS) + "\n")
        for pid, start, row, label in zip(
            data.participant_ids, data.window_starts, data.X, data.y
        ):
            reals = ",".join(format_real(value) for value in row)
            handle.write(f"{pid},{int(start)},{reals},{int(label)}\n")


def read_features(path, participants: Optional[Iterable[str]] = None) -> Dataset:
    """Read the feature file; optionally keep only the given participants."""
    frame = read_table(path, FEATURE_FILE_COLUMNS)
    rows = []
    for index, row in enumerate(frame.itertuples(index=False)):
        line = index + 2
        try:
            values = [float(getattr(row, name)) for name in FEATURE_NAMES]
        except ValueError:
            raise MalformedRowError(path, line, "feature value is not a number")
        if not all(math.isfinite(value) for value in values):
            raise MalformedRowError(path, line, "feature value is not finite")
        label_text = row.label.strip()
        if label_text not in ("0", "1"):
            raise MalformedRowError(path, line, f"label must be 0 or 1 (got {label_text!r})")
        rows.append(
            FeatureVector(
                row.participant_id.strip(),
                parse_timestamp(row.window_start, path, line),
                *values,
                int(label_text),
            )
        )
    data = Dataset.from_vectors(rows)
    if participants is not None:
        data = data.for_participants(participants)
    return data
