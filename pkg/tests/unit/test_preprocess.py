import math
import unittest

import numpy as np
import pytest

from hyperarousal.data.types import EventMark, Recording, Sample
from hyperarousal.errors import DataError, InsufficientDataError
from hyperarousal.preprocess.imputation import (
    ImputationConfig,
    calibrate_max_gap,
    impute_array,
    impute_series,
    missing_runs,
    write_calibration,
)
from hyperarousal.preprocess.windowing import (
    Label,
    WindowConfig,
    label_for,
    make_windows,
    preprocess_recording,
    read_window_dump,
    windows_from_dump,
    write_window_dump,
)

NO_IMPUTATION = ImputationConfig(max_gap=0)


def _complete(span, start=0, events=()):
    samples = tuple(Sample(start + t, 70.0 + (t % 7), 0.1, 0.2, 9.8) for t in range(span))
    return Recording("P1", samples, tuple(EventMark(e) for e in events))


def _noisy(n, seed=1):
    rng = np.random.default_rng(seed)
    return 75.0 + np.cumsum(rng.normal(0.0, 1.0, n)) + rng.normal(0.0, 0.5, n)


class TestImputation(unittest.TestCase):
    def test_observed_values_are_untouched(self):
        """Test that imputation never changes a present value."""
        values = _noisy(300)
        holed = values.copy()
        holed[[10, 11, 50, 120, 121, 122]] = np.nan
        filled = impute_array(holed, ImputationConfig())
        present = ~np.isnan(holed)
        self.assertEqual(filled[present].tobytes(), holed[present].tobytes())
        self.assertFalse(np.isnan(filled).any())

    def test_only_short_runs_are_filled(self):
        """Test that runs longer than max_gap stay missing."""
        values = _noisy(200)
        values[20:23] = np.nan  # 3, filled
        values[60:66] = np.nan  # 6, kept missing
        filled = impute_array(values, ImputationConfig(max_gap=5))
        self.assertFalse(np.isnan(filled[20:23]).any())
        self.assertTrue(np.isnan(filled[60:66]).all())

    def test_run_of_exactly_max_gap_is_filled(self):
        values = _noisy(100)
        values[40:45] = np.nan
        filled = impute_array(values, ImputationConfig(max_gap=5))
        self.assertFalse(np.isnan(filled).any())

    def test_constant_series_imputes_the_constant(self):
        """Test that a flat channel is filled with the same level."""
        values = np.full(50, 72.0)
        values[[5, 6, 30]] = np.nan
        filled = impute_array(values, ImputationConfig())
        np.testing.assert_array_equal(filled, np.full(50, 72.0))

    def test_degenerate_inputs_come_back_unchanged(self):
        all_missing = np.full(10, np.nan)
        self.assertTrue(np.isnan(impute_array(all_missing, ImputationConfig())).all())
        values = _noisy(30)
        values[3] = np.nan
        self.assertTrue(np.isnan(impute_array(values, NO_IMPUTATION)[3]))

    def test_impute_series_uses_none(self):
        """Test the None-coded sequence interface."""
        series = [70.0, 71.0, None, 72.0, 73.0] + [74.0] * 10
        filled = impute_series(series, ImputationConfig(fit_noise=False))
        self.assertIsNotNone(filled[2])
        self.assertEqual(filled[:2], [70.0, 71.0])
        self.assertEqual(filled[3:], series[3:])
        self.assertEqual(impute_series([None, None], ImputationConfig()), [None, None])
        with self.assertRaises(InsufficientDataError):
            impute_series([], ImputationConfig())

    def test_linear_series_fills_the_midpoint(self):
        """Test that a one-sample hole in a straight line lands near the line."""
        filled = impute_series([1.0, 2.0, None, 4.0, 5.0], ImputationConfig())
        self.assertAlmostEqual(filled[2], 3.0, delta=0.5)
        self.assertEqual(filled[:2] + filled[3:], [1.0, 2.0, 4.0, 5.0])

    def test_missing_runs(self):
        starts, lengths = missing_runs(np.array([True, True, False, True, False, False, True]))
        self.assertEqual(starts.tolist(), [0, 3, 6])
        self.assertEqual(lengths.tolist(), [2, 1, 1])


def test_calibration_on_constant_series_accepts_every_gap(tmp_path):
    """Test that exact recovery selects the largest candidate gap."""
    calibration = calibrate_max_gap(np.full(200, 80.0), range(1, 11), trials=5, seed=3)
    assert calibration.chosen_max_gap == 10
    assert all(mse == 0.0 for mse in calibration.mse_by_gap.values())

    path = tmp_path / "calibration.csv"
    write_calibration(calibration, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "gap,mse,trials"
    assert lines[1] == "1,0.0,5"
    assert len(lines) == 11


def test_calibration_threshold_can_reject_every_gap():
    """Test that no gap below the threshold gives max_gap 0."""
    cfg = ImputationConfig(mse_threshold=1e-12)
    calibration = calibrate_max_gap(_noisy(500), [1, 2, 3], trials=10, seed=0, cfg=cfg)
    assert calibration.chosen_max_gap == 0
    assert sorted(calibration.mse_by_gap) == [1, 2, 3]


def test_calibration_is_seeded():
    first = calibrate_max_gap(_noisy(400), [2, 4], trials=20, seed=9)
    second = calibrate_max_gap(_noisy(400), [2, 4], trials=20, seed=9)
    assert first == second


def test_calibration_rejects_bad_series():
    with pytest.raises(DataError):
        calibrate_max_gap(np.array([1.0, np.nan] * 100), [1], trials=1, seed=0)
    with pytest.raises(InsufficientDataError):
        calibrate_max_gap(_noisy(50), [10], trials=1, seed=0)


def _ar1(n, phi=0.9, sigma=5.0, seed=0):
    rng = np.random.default_rng(seed)
    values = np.empty(n)
    values[0] = rng.normal(0.0, sigma / math.sqrt(1.0 - phi * phi))
    for t in range(1, n):
        values[t] = phi * values[t - 1] + rng.normal(0.0, sigma)
    return 75.0 + values


def test_calibration_error_grows_with_gap_length():
    """Test the MSE trend over gaps 1..10 on an AR(1) heart-rate-like series."""
    calibration = calibrate_max_gap(_ar1(600), range(1, 11), trials=150, seed=4)
    mse = calibration.mse_by_gap
    short = np.mean([mse[k] for k in (1, 2, 3)])
    middle = np.mean([mse[k] for k in (4, 5, 6, 7)])
    long = np.mean([mse[k] for k in (8, 9, 10)])
    assert 0.0 < short < middle < long
    assert mse[1] < mse[10]

    below = [k for k in range(1, 11) if mse[k] < ImputationConfig().mse_threshold]
    assert calibration.chosen_max_gap == (max(below) if below else 0)
    assert calibrate_max_gap(_ar1(600), range(1, 11), trials=150, seed=4) == calibration


@pytest.mark.parametrize("span, expected", [(59, 0), (60, 1), (90, 2), (600, 19)])
def test_window_count_for_complete_recordings(span, expected):
    """Test floor((T - 60) / 30) + 1 windows for a complete recording of span T."""
    windows = make_windows(_complete(span, start=1000), NO_IMPUTATION)
    assert len(windows) == expected
    assert all(w.duration == 60 and w.missing_fraction == 0.0 for w in windows)
    assert [w.start for w in windows] == [1000 + 30 * k for k in range(expected)]


def test_windows_are_half_open_for_labels():
    """Test that an event at start + 59 is inside and start + 60 is outside."""
    windows = make_windows(_complete(120, events=[59]), NO_IMPUTATION)
    assert [w.label for w in windows] == [Label.HYPERAROUSAL, Label.HYPERAROUSAL, Label.NON_HYPERAROUSAL]

    windows = make_windows(_complete(120, events=[60]), NO_IMPUTATION)
    assert [w.label for w in windows] == [Label.NON_HYPERAROUSAL, Label.HYPERAROUSAL, Label.HYPERAROUSAL]


def test_label_for():
    assert label_for([5, 100], 0, 60) == Label.HYPERAROUSAL
    assert label_for([60], 0, 60) == Label.NON_HYPERAROUSAL
    assert label_for([], 0, 60) == Label.NON_HYPERAROUSAL


def test_missing_fraction_counts_two_cells_per_second():
    """Test heart-rate-only and absent-row seconds in the missing fraction."""
    samples = []
    for t in range(60):
        if t < 10:
            samples.append(Sample(t, None, 0.1, 0.2, 9.8))
        elif t < 15:
            continue
        else:
            samples.append(Sample(t, 70.0, 0.1, 0.2, 9.8))
    (window,) = make_windows(Recording("P1", tuple(samples)), NO_IMPUTATION)
    assert window.missing_fraction == pytest.approx((10 + 2 * 5) / 120)


@pytest.mark.parametrize("gap, kept", [(48, True), (49, False)])
def test_drop_rule_boundary(gap, kept):
    """Test that exactly 80% missing is kept and more is dropped."""
    samples = [Sample(0, 70.0, 0.0, 0.0, 9.8)]
    samples += [Sample(t, 70.0, 0.0, 0.0, 9.8) for t in range(gap + 1, 60)]
    windows = make_windows(Recording("P1", tuple(samples)), NO_IMPUTATION)
    assert (len(windows) == 1) == kept


def test_window_config_validation():
    with pytest.raises(ValueError):
        WindowConfig(length=0)
    with pytest.raises(ValueError):
        WindowConfig(max_missing_fraction=1.5)


def test_windows_rebuild_from_dump(tmp_path):
    """Test that windows rebuilt from imputed samples match the originals."""
    samples = [Sample(t, 70.0 + math.sin(t / 5.0), 0.1, 0.2, 9.8) for t in range(300)]
    for t in (40, 41, 42, 200):
        samples[t] = Sample(t)
    recording = Recording("P7", tuple(samples), (EventMark(150),))
    imputed, windows = preprocess_recording(recording, ImputationConfig(fit_noise=False))
    assert len(windows) == 9

    path = tmp_path / "windows.csv"
    write_window_dump(windows, path)
    starts = read_window_dump(path)
    assert starts == {"P7": [w.start for w in windows]}

    rebuilt = windows_from_dump(imputed, starts["P7"])
    assert [w.start for w in rebuilt] == [w.start for w in windows]
    for original, copy in zip(windows, rebuilt):
        assert original.label == copy.label
        assert original.missing_fraction == copy.missing_fraction
        np.testing.assert_array_equal(original.hr, copy.hr)
        np.testing.assert_array_equal(original.acc, copy.acc)
