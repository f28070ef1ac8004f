"""5x2 cross-validated paired t-test for comparing classifiers.

Each of five replications shuffles the participants with its own derived
seed and cuts them into two halves; each half serves once for training
(after minority upsampling) and once for testing. With p_i^(j) the accuracy
difference on replication i, fold j:

    s_i² = (p_i^(1) - p̄_i)² + (p_i^(2) - p̄_i)²
    t    = p_1^(1) / sqrt(mean_i s_i²)          (5 degrees of freedom)
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import betainc

from hyperarousal.errors import InsufficientDataError
from hyperarousal.evaluation.operating_point import accuracy, matrix_at_threshold
from hyperarousal.features.dataset import Dataset
from hyperarousal.logger import Logger
from hyperarousal.models.training import train
from hyperarousal.sampling import ResampleSpec, upsample_minority
from hyperarousal.utils.file_utils import atomic_write
from hyperarousal.utils.parallel import parallel_map
from hyperarousal.utils.seeding import derive_seed

REPLICATIONS = 5
FOLDS = 2
DEGREES_OF_FREEDOM = 5
ACCURACY_THRESHOLD = 0.5
COMPARISON_COLUMNS = ["model_a", "model_b", "t_statistic", "p_value", "degenerate"]


@dataclass(frozen=True, eq=False)
class CvComparison:
    model_a: str
    model_b: str
    differences: np.ndarray
    t_statistic: float
    p_value: float
    degenerate: bool = False
    degrees_of_freedom: int = DEGREES_OF_FREEDOM


def t5_two_sided_p(t: float) -> float:
    """Two-sided tail of Student's t with 5 degrees of freedom."""
    if math.isinf(t):
        return 0.0
    x = DEGREES_OF_FREEDOM / (DEGREES_OF_FREEDOM + t * t)
    return float(min(1.0, max(0.0, betainc(DEGREES_OF_FREEDOM / 2.0, 0.5, x))))


def cv5x2_from_differences(table, model_a: str = "a", model_b: str = "b") -> CvComparison:
    """Evaluate the statistic for a 5x2 table of accuracy differences.

    Zero variance gives t = 0, p = 1 when the numerator is 0 too, otherwise
    t = ±inf, p = 0 and ``degenerate`` set.
    """
    differences = np.asarray(table, dtype=float)
    if differences.shape != (REPLICATIONS, FOLDS):
        raise ValueError(f"expected a 5x2 table of differences, got shape {differences.shape}")
    means = differences.mean(axis=1)
    variances = (differences[:, 0] - means) ** 2 + (differences[:, 1] - means) ** 2
    denominator = math.sqrt(float(np.mean(variances)))
    numerator = float(differences[0, 0])
    if denominator == 0.0:
        if numerator == 0.0:
            return CvComparison(model_a, model_b, differences, 0.0, 1.0)
        t = math.copysign(math.inf, numerator)
        return CvComparison(model_a, model_b, differences, t, 0.0, degenerate=True)
    t = numerator / denominator
    return CvComparison(model_a, model_b, differences, t, t5_two_sided_p(t))


def replication_halves(participants: Sequence[str], seed: int, replication: int):
    """Two participant-disjoint halves for one replication."""
    ordered = sorted(set(participants))
    if len(ordered) < 2 * FOLDS:
        raise InsufficientDataError(
            f"5x2 cross-validation needs at least {2 * FOLDS} participants, got {len(ordered)}"
        )
    rng = np.random.default_rng(derive_seed(seed, "cv5x2", replication, "halves"))
    shuffled = [ordered[i] for i in rng.permutation(len(ordered))]
    cut = len(shuffled) // 2
    return frozenset(shuffled[:cut]), frozenset(shuffled[cut:])


def _fold_accuracy(spec, train_part: Dataset, test_part: Dataset, resample: ResampleSpec, seed: int) -> float:
    fold_resample = resample.model_copy(update={"seed": derive_seed(seed, "resample")})
    model = train(spec, upsample_minority(train_part, fold_resample), derive_seed(seed, "train"), threads=1)
    scores = model.predict_proba_batch(test_part.X)
    return accuracy(matrix_at_threshold(scores, test_part.y, ACCURACY_THRESHOLD))


def fold_accuracies(
    specs: Sequence,
    data: Dataset,
    seed: int,
    resample: Optional[ResampleSpec] = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    """Accuracy array of shape (len(specs), 5, 2); each spec is fitted once per fold."""
    resample = resample or ResampleSpec()
    folds: List[Tuple[int, int, Dataset, Dataset]] = []
    for replication in range(REPLICATIONS):
        first, second = replication_halves(data.participants(), seed, replication)
        halves = (data.for_participants(first), data.for_participants(second))
        for fold in range(FOLDS):
            folds.append((replication, fold, halves[fold], halves[1 - fold]))

    tasks = [(index, fold_task) for index in range(len(specs)) for fold_task in folds]

    def run(task):
        index, (replication, fold, train_part, test_part) = task
        fold_seed = derive_seed(seed, "cv5x2", replication, fold)
        return _fold_accuracy(specs[index], train_part, test_part, resample, fold_seed)

    results = parallel_map(run, tasks, threads)
    table = np.zeros((len(specs), REPLICATIONS, FOLDS))
    for (index, (replication, fold, _, _)), value in zip(tasks, results):
        table[index, replication, fold] = value
    return table


def compare_models(
    specs: Sequence,
    data: Dataset,
    seed: int,
    resample: Optional[ResampleSpec] = None,
    threads: Optional[int] = None,
) -> Tuple[Dict[str, np.ndarray], List[CvComparison]]:
    """Fold accuracies per spec and every pairwise comparison (in spec order)."""
    table = fold_accuracies(specs, data, seed, resample, threads)
    accuracies = {spec.label: table[index] for index, spec in enumerate(specs)}
    comparisons = []
    for a, b in itertools.combinations(range(len(specs)), 2):
        comparison = cv5x2_from_differences(table[a] - table[b], specs[a].label, specs[b].label)
        Logger.print_info(
            f"{comparison.model_a} vs {comparison.model_b}: "
            f"t = {comparison.t_statistic:.3f}, p = {comparison.p_value:.4f}"
        )
        comparisons.append(comparison)
    return accuracies, comparisons


def cv5x2_ttest(algorithm_a, algorithm_b, data: Dataset, seed: int,
                resample: Optional[ResampleSpec] = None, threads: Optional[int] = None) -> CvComparison:
    """Compare two model specs; fold seeds are shared, so identical specs give t = 0."""
    _, comparisons = compare_models([algorithm_a, algorithm_b], data, seed, resample, threads)
    return comparisons[0]


def write_comparisons(comparisons: Sequence[CvComparison], path):
    with atomic_write(path) as handle:
        handle.write(",".join(COMPARISON_COLUMNS) + "\n")
        for c in comparisons:
            handle.write(
                f"{c.model_a},{c.model_b},{c.t_statistic!r},{c.p_value!r},"
                f"{str(c.degenerate).lower()}\n"
            )
