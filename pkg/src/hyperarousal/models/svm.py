"""RBF-kernel soft-margin SVM solved by SMO, with Platt-scaled probabilities.

The dual problem is

    min 0.5 * a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j k(x_i, x_j)

and the decision function is f(x) = sum_i a_i y_i k(x_i, x) - rho. Working
pairs are chosen with second-order information; kernel rows are computed on
demand and kept in an LRU cache bounded in megabytes.
"""

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from hyperarousal.errors import ConvergenceError
from hyperarousal.logger import Logger
from hyperarousal.models.base import TrainedModel
from hyperarousal.models.specs import RbfSvmSpec
from hyperarousal.models.standardizer import Standardizer

_TAU = 1e-12
_PREDICT_CHUNK = 512


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||a - b||²) for every row pair."""
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


class KernelCache:
    """LRU cache of kernel rows k(x_i, X)."""

    def __init__(self, X: np.ndarray, gamma: float, cache_mb: int):
        self.X = X
        self.gamma = gamma
        self.row_norms = np.sum(X * X, axis=1)
        row_bytes = max(1, X.shape[0] * 8)
        self.capacity = max(2, (cache_mb * 1024 * 1024) // row_bytes)
        self._rows: "OrderedDict[int, np.ndarray]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    def row(self, i: int) -> np.ndarray:
        cached = self._rows.get(i)
        if cached is not None:
            self._rows.move_to_end(i)
            self.hits += 1
            return cached
        self.misses += 1
        sq = self.row_norms[i] + self.row_norms - 2.0 * (self.X @ self.X[i])
        values = np.exp(-self.gamma * np.maximum(sq, 0.0))
        values[i] = 1.0
        self._rows[i] = values
        if len(self._rows) > self.capacity:
            self._rows.popitem(last=False)
        return values


@dataclass(frozen=True, eq=False)
class SmoResult:
    alpha: np.ndarray
    gradient: np.ndarray
    rho: float
    iterations: int
    kkt_gap: float


def _bounds(alpha, y, C):
    """Masks of the index sets where alpha may move up / down along y."""
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    return up, low


def kkt_gap(alpha: np.ndarray, gradient: np.ndarray, y: np.ndarray, C: float) -> float:
    """max over I_up of -y*G minus min over I_low of -y*G (0 when either set is empty)."""
    up, low = _bounds(alpha, y, C)
    if not up.any() or not low.any():
        return 0.0
    score = -y * gradient
    return float(np.max(score[up]) - np.min(score[low]))


def _rho(alpha, gradient, y, C) -> float:
    """Mean y*G over free vectors, else the midpoint of the bound-implied interval."""
    yg = y * gradient
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(np.mean(yg[free]))
    at_upper = alpha >= C
    upper_side = (at_upper & (y < 0)) | (~at_upper & (y > 0))
    ub = float(np.min(yg[upper_side])) if upper_side.any() else np.inf
    lb = float(np.max(yg[~upper_side])) if (~upper_side).any() else -np.inf
    if np.isfinite(ub) and np.isfinite(lb):
        return 0.5 * (ub + lb)
    return ub if np.isfinite(ub) else lb if np.isfinite(lb) else 0.0


def smo_solve(
    X: np.ndarray,
    y: np.ndarray,
    C: float,
    gamma: float,
    tol: float = 1e-3,
    max_iter: int = 200_000,
    cache_mb: int = 256,
) -> SmoResult:
    """Solve the dual for labels ``y`` in {-1, +1}.

    Raises:
        ConvergenceError: ``max_iter`` updates without the KKT gap reaching ``tol``.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    cache = KernelCache(X, gamma, cache_mb)
    alpha = np.zeros(n)
    gradient = -np.ones(n)
    iterations = 0
    while True:
        up, low = _bounds(alpha, y, C)
        score = -y * gradient
        if not up.any() or not low.any():
            gap = 0.0
            break
        up_scores = np.where(up, score, -np.inf)
        i = int(np.argmax(up_scores))
        g_max = up_scores[i]
        g_min = float(np.min(score[low]))
        gap = float(g_max - g_min)
        if gap < tol:
            break
        if iterations >= max_iter:
            raise ConvergenceError(
                "SMO reached its iteration cap",
                {"iterations": iterations, "kkt_gap": gap, "tol": tol},
            )

        k_i = cache.row(i)
        candidates = low & (score < g_max)
        b = g_max - score
        a = np.maximum(2.0 - 2.0 * k_i, _TAU)
        objective = np.where(candidates, -(b * b) / a, np.inf)
        j = int(np.argmin(objective))
        k_j = cache.row(j)

        old_i, old_j = alpha[i], alpha[j]
        quad = max(2.0 - 2.0 * k_i[j], _TAU)
        if y[i] != y[j]:
            delta = (-gradient[i] - gradient[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            elif alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
        else:
            delta = (gradient[i] - gradient[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            elif alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = total

        gradient += y * (y[i] * (alpha[i] - old_i) * k_i + y[j] * (alpha[j] - old_j) * k_j)
        iterations += 1

    Logger.print_debug(
        f"SMO finished after {iterations} updates (gap {gap:.2e}, "
        f"cache {cache.hits} hits / {cache.misses} misses)"
    )
    return SmoResult(
        alpha=alpha,
        gradient=gradient,
        rho=_rho(alpha, gradient, y, C),
        iterations=iterations,
        kkt_gap=gap,
    )


def fit_platt(decision_values: np.ndarray, labels: np.ndarray, max_iter: int = 100) -> Tuple[float, float]:
    """Sigmoid P(y=1|f) = 1 / (1 + exp(A f + B)) fitted by Newton's method.

    Targets are smoothed to (N+ + 1)/(N+ + 2) and 1/(N- + 2).
    """
    f = np.asarray(decision_values, dtype=float)
    positives = int(np.sum(labels == 1))
    negatives = labels.size - positives
    hi = (positives + 1.0) / (positives + 2.0)
    lo = 1.0 / (negatives + 2.0)
    t = np.where(labels == 1, hi, lo)

    def objective(A, B):
        z = f * A + B
        return float(np.sum(np.where(z >= 0, t * z + np.log1p(np.exp(-np.abs(z))),
                                     (t - 1.0) * z + np.log1p(np.exp(-np.abs(z))))))

    A = 0.0
    B = math.log((negatives + 1.0) / (positives + 1.0))
    value = objective(A, B)
    sigma = 1e-12
    for _ in range(max_iter):
        z = f * A + B
        # p = 1 / (1 + exp(z)), q = 1 - p, computed without overflow
        p = np.where(z >= 0, np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))),
                     1.0 / (1.0 + np.exp(-np.abs(z))))
        q = 1.0 - p
        d2 = p * q
        h11 = sigma + float(np.sum(f * f * d2))
        h22 = sigma + float(np.sum(d2))
        h21 = float(np.sum(f * d2))
        d1 = t - p
        g1 = float(np.sum(f * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= 1e-10:
            new_A, new_B = A + step * dA, B + step * dB
            new_value = objective(new_A, new_B)
            if new_value < value + 1e-4 * step * gd:
                A, B, value = new_A, new_B, new_value
                break
            step *= 0.5
        else:
            Logger.print_warning("Platt scaling line search failed; keeping current sigmoid")
            break
    else:
        Logger.print_warning("Platt scaling reached its iteration cap")
    return A, B


class RbfSvmModel(TrainedModel):
    """Margin = SVM decision value; probability = Platt sigmoid of the margin."""

    kind = "rbf_svm"

    def __init__(self, spec, support_vectors, dual_coef, rho, platt_a, platt_b, **kwargs):
        super().__init__(spec, **kwargs)
        self.support_vectors = np.asarray(support_vectors, dtype=float)
        self.dual_coef = np.asarray(dual_coef, dtype=float)
        self.rho = float(rho)
        self.platt_a = float(platt_a)
        self.platt_b = float(platt_b)

    def _margins(self, Z):
        if self.dual_coef.size == 0:
            return np.full(Z.shape[0], -self.rho)
        margins = np.empty(Z.shape[0])
        for start in range(0, Z.shape[0], _PREDICT_CHUNK):
            block = rbf_kernel(Z[start : start + _PREDICT_CHUNK], self.support_vectors, self.spec.gamma)
            margins[start : start + _PREDICT_CHUNK] = block @ self.dual_coef
        return margins - self.rho

    def _probabilities(self, Z, margins):
        z = self.platt_a * margins + self.platt_b
        return np.where(
            z >= 0,
            np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))),
            1.0 / (1.0 + np.exp(-np.abs(z))),
        )

    def parameters_to_dict(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "rho": self.rho,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
        }

    @classmethod
    def from_parameters(cls, spec, parameters, feature_names, training_seed, standardizer):
        support_vectors = np.asarray(parameters["support_vectors"], dtype=float)
        support_vectors = support_vectors.reshape(-1, len(feature_names))
        return cls(
            spec,
            support_vectors=support_vectors,
            dual_coef=parameters["dual_coef"],
            rho=parameters["rho"],
            platt_a=parameters["platt_a"],
            platt_b=parameters["platt_b"],
            feature_names=feature_names,
            training_seed=training_seed,
            standardizer=standardizer,
        )


def train_svm(spec: RbfSvmSpec, X: np.ndarray, y: np.ndarray, seed: int, feature_names) -> RbfSvmModel:
    """Standardize, solve the dual, then fit Platt scaling on the training decision values."""
    standardizer = Standardizer.fit(X, feature_names)
    Z = standardizer.transform(X)
    signs = np.where(np.asarray(y) == 1, 1.0, -1.0)
    result = smo_solve(Z, signs, spec.C, spec.gamma, spec.tol, spec.max_iter, spec.cache_mb)
    support = np.flatnonzero(result.alpha > 0)
    dual_coef = result.alpha[support] * signs[support]
    # training decision values: sum_j a_j y_j K_ij - rho = y_i (G_i + 1) - rho
    decision = signs * (result.gradient + 1.0) - result.rho
    platt_a, platt_b = fit_platt(decision, np.asarray(y))
    Logger.print_debug(
        f"rbf svm: {support.size} support vectors, Platt A={platt_a:.4f} B={platt_b:.4f}"
    )
    return RbfSvmModel(
        spec,
        support_vectors=Z[support],
        dual_coef=dual_coef,
        rho=result.rho,
        platt_a=platt_a,
        platt_b=platt_b,
        feature_names=feature_names,
        training_seed=seed,
        standardizer=standardizer,
    )
