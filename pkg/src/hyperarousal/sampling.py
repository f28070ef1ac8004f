"""Participant-level train/test splitting and minority upsampling.

Windows follow their participant into exactly one side of a split, and only
training data is ever resampled.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hyperarousal.data.io import read_table
from hyperarousal.errors import InsufficientDataError, MalformedRowError
from hyperarousal.features.dataset import Dataset
from hyperarousal.logger import Logger
from hyperarousal.utils.file_utils import atomic_write
from hyperarousal.utils.seeding import derive_seed

SPLIT_MANIFEST_COLUMNS = ["participant_id", "role"]
SWEEP_COLUMNS = ["ratio", "majority_units", "minority_units", "minority_rows", "metric"]


class ResampleSpec(BaseModel):
    """Target class ratio majority_units : minority_units after upsampling."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    majority_units: int = Field(4, gt=0)
    minority_units: int = Field(3, gt=0)
    seed: int = 0

    @property
    def name(self) -> str:
        return f"{self.majority_units}-{self.minority_units}"


DEFAULT_SWEEP_RATIOS = [(1, 1), (2, 1), (3, 1), (3, 2), (4, 3)]


@dataclass(frozen=True, eq=False)
class SplitResult:
    train: Dataset
    test: Dataset
    train_participants: FrozenSet[str]
    test_participants: FrozenSet[str]
    seed: int


@dataclass(frozen=True)
class SweepRow:
    ratio: str
    majority_units: int
    minority_units: int
    minority_rows: int
    metric: float


def train_participant_count(total: int, train_fraction: float) -> int:
    """round-half-up(train_fraction * total), kept within [1, total - 1]."""
    count = math.floor(train_fraction * total + 0.5)
    return min(max(count, 1), total - 1)


def split_participants(
    participants: Sequence[str], train_fraction: float, seed: int
):
    """Shuffle sorted participant ids with ``seed`` and cut at the train count."""
    ordered = sorted(set(participants))
    if len(ordered) < 2:
        raise InsufficientDataError(
            f"cannot split {len(ordered)} participant(s); at least 2 are needed"
        )
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    permutation = np.random.default_rng(seed).permutation(len(ordered))
    shuffled = [ordered[i] for i in permutation]
    cut = train_participant_count(len(ordered), train_fraction)
    return frozenset(shuffled[:cut]), frozenset(shuffled[cut:])


def split_by_participant(data: Dataset, train_fraction: float, seed: int) -> SplitResult:
    """Assign whole participants to train or test.

    Raises:
        InsufficientDataError: Fewer than two participants.
    """
    train_ids, test_ids = split_participants(data.participants(), train_fraction, seed)
    Logger.print_debug(
        f"split {len(train_ids)} train / {len(test_ids)} test participants (seed {seed})"
    )
    return SplitResult(
        train=data.for_participants(train_ids),
        test=data.for_participants(test_ids),
        train_participants=train_ids,
        test_participants=test_ids,
        seed=seed,
    )


def upsample_target(majority_count: int, spec: ResampleSpec) -> int:
    """floor(majority_count * minority_units / majority_units)."""
    return (majority_count * spec.minority_units) // spec.majority_units


def upsample_minority(train: Dataset, spec: ResampleSpec) -> Dataset:
    """Replicate minority rows (with replacement) up to the ResampleSpec ratio.

    Original rows are kept in their order and the seeded draws are appended.
    A minority class already at or above the target is left unchanged.

    Raises:
        InsufficientDataError: ``train`` holds a single class.
    """
    counts = train.class_counts()
    if counts[0] == 0 or counts[1] == 0:
        raise InsufficientDataError("upsampling needs both classes in the training data")
    minority_label = 1 if counts[1] <= counts[0] else 0
    majority_count = counts[1 - minority_label]
    minority_rows = np.flatnonzero(train.y == minority_label)
    target = upsample_target(majority_count, spec)
    extra = target - minority_rows.size
    if extra <= 0:
        return train
    rng = np.random.default_rng(spec.seed)
    draws = minority_rows[rng.integers(0, minority_rows.size, size=extra)]
    Logger.print_debug(
        f"upsampled class {minority_label}: {minority_rows.size} -> {target} rows "
        f"(ratio {spec.name})"
    )
    return train.take(np.concatenate([np.arange(len(train)), draws]))


def ratio_sweep(
    train: Dataset,
    ratios: Sequence[ResampleSpec],
    evaluator: Callable[[Dataset, Dataset], float],
    seed: int,
    validation_fraction: float = 0.3,
) -> List[SweepRow]:
    """Score each resampling ratio on validation participants held out of ``train``.

    ``train`` is split by participant once; every ratio upsamples only the
    fitting part and ``evaluator(fitting, validation)`` returns the metric.
    """
    if not ratios:
        raise ValueError("ratio_sweep needs at least one ratio")
    inner = split_by_participant(train, 1.0 - validation_fraction, derive_seed(seed, "sweep"))
    rows = []
    for spec in ratios:
        resampled = upsample_minority(inner.train, spec)
        metric = float(evaluator(resampled, inner.test))
        rows.append(
            SweepRow(
                ratio=spec.name,
                majority_units=spec.majority_units,
                minority_units=spec.minority_units,
                minority_rows=int(np.sum(resampled.y == 1)),
                metric=metric,
            )
        )
        Logger.print_info(f"ratio {spec.name}: metric {metric:.4f}")
    return rows


def write_split_manifest(split: SplitResult, path):
    """Write ``participant_id,role`` rows, train first, ids sorted."""
    with atomic_write(path) as handle:
        handle.write(",".join(SPLIT_MANIFEST_COLUMNS) + "\n")
        for pid in sorted(split.train_participants):
            handle.write(f"{pid},train\n")
        for pid in sorted(split.test_participants):
            handle.write(f"{pid},test\n")


def read_split_manifest(path) -> Dict[str, FrozenSet[str]]:
    """``{"train": ids, "test": ids}`` from a split manifest."""
    frame = read_table(path, SPLIT_MANIFEST_COLUMNS)
    roles: Dict[str, set] = {"train": set(), "test": set()}
    for index, row in enumerate(frame.itertuples(index=False)):
        role = row.role.strip()
        if role not in roles:
            raise MalformedRowError(path, index + 2, f"role must be train or test (got {role!r})")
        roles[role].add(row.participant_id.strip())
    overlap = roles["train"] & roles["test"]
    if overlap:
        raise MalformedRowError(
            path, 1, f"participants on both sides of the split: {sorted(overlap)}"
        )
    return {role: frozenset(ids) for role, ids in roles.items()}


def write_sweep(rows: Sequence[SweepRow], path):
    with atomic_write(path) as handle:
        handle.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            handle.write(
                f"{row.ratio},{row.majority_units},{row.minority_units},"
                f"{row.minority_rows},{format(row.metric, '.17g')}\n"
            )
