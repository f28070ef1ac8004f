import math

import numpy as np
import pytest

from hyperarousal.errors import FeatureExtractionError, MalformedRowError
from hyperarousal.features.dataset import Dataset, read_features, write_features
from hyperarousal.features.extraction import (
    FEATURE_NAMES,
    acc_magnitude,
    extract_all,
    extract_features,
    write_rejections,
)
from hyperarousal.preprocess.windowing import Label, Window


def _window(hr, acc, start=0, label=Label.NON_HYPERAROUSAL, pid="P1"):
    hr = np.asarray(hr, dtype=float)
    acc = np.asarray(acc, dtype=float).reshape(-1, 3)
    n = hr.size
    return Window(
        participant_id=pid,
        start=start,
        duration=n,
        timestamps=np.arange(start, start + n),
        hr=hr,
        acc=acc,
        label=label,
        missing_fraction=0.0,
    )


def test_acc_magnitude():
    assert acc_magnitude(3.0, 4.0, 0.0) == 5.0
    assert acc_magnitude(0.0, 0.0, 0.0) == 0.0


def test_extract_features_values():
    """Test every feature on a small hand-computed window."""
    window = _window(
        [60.0, 70.0, np.nan, 80.0],
        [[3.0, 4.0, 0.0], [0.0, 0.0, 1.0], [np.nan] * 3, [0.0, 6.0, 8.0]],
        start=30,
        label=Label.HYPERAROUSAL,
    )
    vector = extract_features(window)
    assert vector.participant_id == "P1"
    assert vector.window_start == 30
    assert vector.label == 1
    assert vector.hrmean == 70.0
    assert vector.hrmax == 80.0
    assert vector.hrmin == 60.0
    assert vector.hrsd == 10.0
    assert vector.hrrange == 20.0
    assert vector.linaccmax == 10.0
    assert vector.linaccmin == 1.0
    assert vector.linaccmean == pytest.approx(16.0 / 3.0)
    assert vector.linaccrange == 9.0
    assert len(vector.values()) == len(FEATURE_NAMES)


def test_feature_relations_hold():
    """Test that min <= mean <= max, range = max - min and sd >= 0."""
    rng = np.random.default_rng(4)
    for _ in range(20):
        window = _window(rng.normal(80, 10, 60), rng.normal(0, 2, (60, 3)))
        v = extract_features(window)
        assert v.hrmin <= v.hrmean <= v.hrmax
        assert v.linaccmin <= v.linaccmean <= v.linaccmax
        assert v.hrrange == v.hrmax - v.hrmin
        assert v.linaccrange == v.linaccmax - v.linaccmin
        assert v.hrsd >= 0.0


def test_mean_does_not_depend_on_order():
    values = [0.1, 0.2, 0.3, 1e16, -1e16, 0.7]
    forward = extract_features(_window(np.array(values) + 100.0, np.ones((6, 3))))
    backward = extract_features(_window(np.array(values[::-1]) + 100.0, np.ones((6, 3))))
    assert forward.hrmean == backward.hrmean


@pytest.mark.parametrize(
    "hr, acc, channel",
    [
        ([70.0, np.nan, np.nan], np.ones((3, 3)), "heart-rate"),
        ([70.0, 71.0, 72.0], [[1, 1, 1], [np.nan] * 3, [np.nan] * 3], "acceleration"),
    ],
)
def test_too_few_values_is_rejected(hr, acc, channel):
    """Test that fewer than two present values raises with a named reason."""
    with pytest.raises(FeatureExtractionError) as exc_info:
        extract_features(_window(hr, acc, start=90))
    assert channel in exc_info.value.reason
    assert exc_info.value.window_start == 90


def test_extract_all_separates_rejections(tmp_path):
    good = _window([70.0, 72.0], np.ones((2, 3)), start=0)
    bad = _window([70.0, np.nan], np.ones((2, 3)), start=30)
    vectors, rejected = extract_all([good, bad, good], threads=2)
    assert [v.window_start for v in vectors] == [0, 0]
    assert [(r.participant_id, r.window_start) for r in rejected] == [("P1", 30)]

    path = tmp_path / "rejected.csv"
    write_rejections(rejected, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "participant_id,window_start,reason"
    assert lines[1].startswith("P1,30,")


def test_feature_file_round_trip_is_exact(tmp_path):
    """Test that written reals read back as the identical doubles."""
    rng = np.random.default_rng(0)
    windows = [
        _window(rng.normal(80, 10, 60), rng.normal(0, 2, (60, 3)), start=30 * i, pid=f"P{i % 3}")
        for i in range(12)
    ]
    vectors, _ = extract_all(windows)
    path = tmp_path / "features.csv"
    write_features(vectors, path)
    data = read_features(path)
    assert data.to_vectors() == vectors
    assert read_features(path).identical_to(Dataset.from_vectors(vectors))
    header = path.read_text().splitlines()[0]
    assert header == "participant_id,window_start," + ",".join(FEATURE_NAMES) + ",label"


def test_read_features_rejects_bad_label(tmp_path):
    path = tmp_path / "features.csv"
    header = "participant_id,window_start," + ",".join(FEATURE_NAMES) + ",label\n"
    path.write_text(header + "P1,0," + ",".join(["1.0"] * len(FEATURE_NAMES)) + ",2\n")
    with pytest.raises(MalformedRowError) as exc_info:
        read_features(path)
    assert exc_info.value.line == 2


def test_dataset_subsetting():
    """Test participant and index selection on a Dataset."""
    X = np.arange(4 * len(FEATURE_NAMES), dtype=float).reshape(4, -1)
    data = Dataset(
        X=X,
        y=np.array([0, 1, 0, 1]),
        participant_ids=np.array(["A", "B", "A", "C"], dtype=object),
        window_starts=np.array([0, 0, 30, 0]),
    )
    assert data.participants() == ["A", "B", "C"]
    only_a = data.for_participants(["A"])
    assert only_a.window_starts.tolist() == [0, 30]
    assert data.take([3, 3]).y.tolist() == [1, 1]
    assert data.class_counts() == {0: 2, 1: 2}
    assert not data.for_participants(["A"]).has_both_classes()
    assert math.isclose(float(data.take([1]).X[0, 0]), float(len(FEATURE_NAMES)))


@pytest.mark.parametrize("cell", ["nan", "inf", "-inf"])
def test_read_features_rejects_non_finite_values(tmp_path, cell):
    """Test that a NaN or infinite feature cell is a malformed row, not a value."""
    path = tmp_path / "features.csv"
    header = "participant_id,window_start," + ",".join(FEATURE_NAMES) + ",label\n"
    good = "P1,0," + ",".join(["1.0"] * len(FEATURE_NAMES)) + ",0\n"
    bad = "P1,30," + ",".join([cell] + ["1.0"] * (len(FEATURE_NAMES) - 1)) + ",1\n"
    path.write_text(header + good + bad)
    with pytest.raises(MalformedRowError) as exc_info:
        read_features(path)
    assert exc_info.value.line == 3
    assert exc_info.value.rule == "feature value is not finite"
