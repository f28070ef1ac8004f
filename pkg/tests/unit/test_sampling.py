import numpy as np
import pytest

from hyperarousal.errors import InsufficientDataError, MalformedRowError
from hyperarousal.features.dataset import Dataset
from hyperarousal.features.extraction import FEATURE_NAMES
from hyperarousal.sampling import (
    ResampleSpec,
    SweepRow,
    ratio_sweep,
    read_split_manifest,
    split_by_participant,
    train_participant_count,
    upsample_minority,
    upsample_target,
    write_split_manifest,
    write_sweep,
)


def _dataset(labels, participants=None):
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.size
    if participants is None:
        participants = [f"P{i % 10:02d}" for i in range(n)]
    return Dataset(
        X=np.arange(n * len(FEATURE_NAMES), dtype=float).reshape(n, -1),
        y=labels,
        participant_ids=np.array(participants, dtype=object),
        window_starts=np.arange(n, dtype=np.int64) * 30,
    )


def test_four_to_three_upsampling_target():
    """Test the 9486 majority / 372 minority case yields 7114 minority rows."""
    assert upsample_target(9486, ResampleSpec(majority_units=4, minority_units=3)) == 7114

    data = _dataset([0] * 9486 + [1] * 372)
    resampled = upsample_minority(data, ResampleSpec(majority_units=4, minority_units=3, seed=1))
    assert int(np.sum(resampled.y == 1)) == 7114
    assert int(np.sum(resampled.y == 0)) == 9486


def test_upsampling_keeps_originals_in_order():
    """Test that original rows come first and draws are minority copies."""
    data = _dataset([0] * 20 + [1] * 4)
    resampled = upsample_minority(data, ResampleSpec(majority_units=1, minority_units=1, seed=5))
    assert len(resampled) == 40
    assert resampled.take(np.arange(24)).identical_to(data)
    drawn = resampled.take(np.arange(24, 40))
    assert set(drawn.window_starts.tolist()) <= set(data.window_starts[20:].tolist())
    assert (drawn.y == 1).all()


def test_upsampling_is_seeded():
    data = _dataset([0] * 30 + [1] * 5)
    spec = ResampleSpec(majority_units=1, minority_units=1, seed=11)
    assert upsample_minority(data, spec).identical_to(upsample_minority(data, spec))


def test_minority_already_above_target_is_unchanged():
    data = _dataset([0] * 10 + [1] * 9)
    assert upsample_minority(data, ResampleSpec(majority_units=4, minority_units=3)) is data


def test_minority_may_be_the_zero_label():
    data = _dataset([1] * 12 + [0] * 3)
    resampled = upsample_minority(data, ResampleSpec(majority_units=1, minority_units=1))
    assert resampled.class_counts() == {0: 12, 1: 12}


def test_single_class_is_insufficient():
    with pytest.raises(InsufficientDataError):
        upsample_minority(_dataset([0] * 10), ResampleSpec())


def test_resample_spec_needs_positive_units():
    with pytest.raises(ValueError):
        ResampleSpec(majority_units=0, minority_units=3)


@pytest.mark.parametrize("total, fraction, expected", [(10, 0.7, 7), (2, 0.7, 1), (5, 0.5, 3), (3, 0.01, 1)])
def test_train_participant_count(total, fraction, expected):
    assert train_participant_count(total, fraction) == expected


def test_split_keeps_participants_whole(tmp_path):
    """Test disjoint participant sets and that every window follows its participant."""
    data = _dataset([0, 1] * 50)
    split = split_by_participant(data, 0.7, seed=3)
    assert not split.train_participants & split.test_participants
    assert split.train_participants | split.test_participants == set(data.participants())
    assert len(split.train_participants) == 7
    assert set(split.train.participants()) == split.train_participants
    assert len(split.train) + len(split.test) == len(data)

    again = split_by_participant(data, 0.7, seed=3)
    assert again.train_participants == split.train_participants

    path = tmp_path / "split.csv"
    write_split_manifest(split, path)
    roles = read_split_manifest(path)
    assert roles["train"] == split.train_participants
    assert roles["test"] == split.test_participants


def test_split_needs_two_participants():
    with pytest.raises(InsufficientDataError):
        split_by_participant(_dataset([0, 1], participants=["A", "A"]), 0.7, seed=0)


def test_manifest_rejects_unknown_role(tmp_path):
    path = tmp_path / "split.csv"
    path.write_text("participant_id,role\nA,train\nB,validate\n")
    with pytest.raises(MalformedRowError) as exc_info:
        read_split_manifest(path)
    assert exc_info.value.line == 3


def test_ratio_sweep_scores_every_ratio(tmp_path):
    """Test that each ratio upsamples only the fitting part."""
    data = _dataset(([0] * 9 + [1]) * 10, participants=[f"P{i // 10:02d}" for i in range(100)])
    seen = []

    def evaluator(fitting, validation):
        seen.append((fitting.class_counts(), set(validation.participants())))
        return float(fitting.class_counts()[1])

    ratios = [ResampleSpec(majority_units=1, minority_units=1), ResampleSpec(majority_units=3, minority_units=1)]
    rows = ratio_sweep(data, ratios, evaluator, seed=0)
    assert [row.ratio for row in rows] == ["1-1", "3-1"]
    assert rows[0].metric == float(rows[0].minority_rows)
    validation_sets = {frozenset(s) for _, s in seen}
    assert len(validation_sets) == 1
    fitting_counts = [counts for counts, _ in seen]
    assert fitting_counts[0][1] == fitting_counts[0][0]
    assert fitting_counts[1][1] == fitting_counts[1][0] // 3

    path = tmp_path / "ratio_sweep.csv"
    write_sweep(rows + [SweepRow("x", 1, 1, 0, float("nan"))], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "ratio,majority_units,minority_units,minority_rows,metric"
    assert lines[-1] == "x,1,1,0,nan"
