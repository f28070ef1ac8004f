"""SVG charts for SHAP summaries and dependence data.

Output is reproducible: fixed SVG hash salt, no date metadata.
"""

from pathlib import Path
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from hyperarousal.explain.summary import DependenceData, SummaryData  # noqa: E402
from hyperarousal.features.extraction import ACC_FEATURES, HR_FEATURES  # noqa: E402
from hyperarousal.utils.file_utils import ensure_dir  # noqa: E402

_SVG_RC = {"svg.hashsalt": "hyperarousal", "svg.fonttype": "none"}


def _save(figure, path: Path):
    ensure_dir(path.parent)
    with matplotlib.rc_context(_SVG_RC):
        figure.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(figure)


def _normalized(values: np.ndarray) -> np.ndarray:
    low, high = np.min(values), np.max(values)
    if high <= low:
        return np.full(values.shape, 0.5)
    return (values - low) / (high - low)


def plot_summary(summary: SummaryData, path) -> Path:
    """One row per feature (top rank at the top), points coloured low-to-high by feature value."""
    path = Path(path)
    count = len(summary.features)
    figure, axes = plt.subplots(figsize=(7.0, 0.45 * count + 1.5))
    rng = np.random.default_rng(0)
    for position, entry in enumerate(summary.features):
        points = np.asarray(entry.points, dtype=float).reshape(-1, 2)
        row = count - 1 - position
        jitter = rng.uniform(-0.2, 0.2, size=points.shape[0])
        axes.scatter(
            points[:, 1],
            row + jitter,
            c=_normalized(points[:, 0]),
            cmap="coolwarm",
            s=6,
            vmin=0.0,
            vmax=1.0,
        )
    axes.set_yticks(range(count))
    axes.set_yticklabels([entry.feature for entry in reversed(summary.features)])
    axes.axvline(0.0, color="grey", linewidth=0.8)
    axes.set_xlabel("SHAP value (log-odds)")
    axes.set_title("Feature impact (ordered by mean |SHAP|)")
    _save(figure, path)
    return path


def plot_dependence(data: DependenceData, path) -> Path:
    path = Path(path)
    figure, axes = plt.subplots(figsize=(5.5, 4.0))
    axes.scatter(data.feature_values, data.shap_values, s=6, color="tab:blue")
    axes.axhline(0.0, color="grey", linewidth=0.8)
    axes.set_xlabel(data.feature)
    axes.set_ylabel(f"SHAP value for {data.feature} (log-odds)")
    _save(figure, path)
    return path


def dependence_features(summary: SummaryData, per_group: int = 2) -> List[str]:
    """Top-ranked acceleration and heart-rate features, ``per_group`` of each."""
    order = summary.order
    acc = [name for name in order if name in ACC_FEATURES][:per_group]
    hr = [name for name in order if name in HR_FEATURES][:per_group]
    return acc + hr


def render_plots(summary: SummaryData, dependences: Sequence[DependenceData], directory) -> List[Path]:
    directory = Path(directory)
    written = [plot_summary(summary, directory / "shap_summary.svg")]
    for data in dependences:
        written.append(plot_dependence(data, directory / f"dependence_{data.feature}.svg"))
    return written
