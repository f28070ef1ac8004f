"""Gap imputation and sliding-window segmentation."""

from .imputation import (
    GapCalibration,
    ImputationConfig,
    NoiseParams,
    calibrate_max_gap,
    impute_array,
    impute_series,
    write_calibration,
)
from .windowing import (
    Label,
    Window,
    WindowConfig,
    impute_recording,
    make_windows,
    preprocess_recording,
    read_window_dump,
    windows_from_dump,
    write_window_dump,
)

__all__ = [
    "GapCalibration",
    "ImputationConfig",
    "NoiseParams",
    "calibrate_max_gap",
    "impute_array",
    "impute_series",
    "write_calibration",
    "Label",
    "Window",
    "WindowConfig",
    "impute_recording",
    "make_windows",
    "preprocess_recording",
    "read_window_dump",
    "windows_from_dump",
    "write_window_dump",
]
