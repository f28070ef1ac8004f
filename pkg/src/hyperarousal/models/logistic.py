"""L2-penalized logistic regression fitted by damped Newton iterations.

Parameters are ``theta = [intercept, w_1, ..., w_d]`` on standardized
features. The objective is mean log-loss + lam * ||w||²; the intercept is not
penalized.
"""

from typing import Optional

import numpy as np
from scipy.special import expit

from hyperarousal.errors import ConvergenceError
from hyperarousal.logger import Logger
from hyperarousal.models.base import TrainedModel
from hyperarousal.models.specs import LogisticRegressionSpec
from hyperarousal.models.standardizer import Standardizer

_ARMIJO = 1e-4
_MAX_HALVINGS = 60


def _with_intercept(Z: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((Z.shape[0], 1)), Z])


def penalized_loss(theta: np.ndarray, Z: np.ndarray, y: np.ndarray, lam: float) -> float:
    margin = _with_intercept(Z) @ theta
    data_term = np.mean(np.logaddexp(0.0, margin) - y * margin)
    return float(data_term + lam * np.dot(theta[1:], theta[1:]))


def penalized_gradient(theta: np.ndarray, Z: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    design = _with_intercept(Z)
    residual = expit(design @ theta) - y
    gradient = design.T @ residual / Z.shape[0]
    gradient[1:] += 2.0 * lam * theta[1:]
    return gradient


def penalized_hessian(theta: np.ndarray, Z: np.ndarray, lam: float) -> np.ndarray:
    design = _with_intercept(Z)
    p = expit(design @ theta)
    hessian = (design * (p * (1.0 - p))[:, None]).T @ design / Z.shape[0]
    penalty = np.full(theta.size, 2.0 * lam)
    penalty[0] = 0.0
    return hessian + np.diag(penalty)


def fit_logistic(
    Z: np.ndarray,
    y: np.ndarray,
    lam: float,
    tol: float = 1e-6,
    max_iter: int = 100,
    start: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Minimize the penalized loss until ||gradient||∞ <= tol.

    Raises:
        ConvergenceError: ``max_iter`` Newton steps without reaching ``tol``.
    """
    y = np.asarray(y, dtype=float)
    theta = np.zeros(Z.shape[1] + 1) if start is None else np.array(start, dtype=float)
    loss = penalized_loss(theta, Z, y, lam)
    for iteration in range(max_iter + 1):
        gradient = penalized_gradient(theta, Z, y, lam)
        gradient_norm = float(np.max(np.abs(gradient)))
        if gradient_norm <= tol:
            Logger.print_debug(
                f"logistic regression converged in {iteration} steps (loss {loss:.8f})"
            )
            return theta
        if iteration == max_iter:
            break
        hessian = penalized_hessian(theta, Z, lam)
        try:
            direction = -np.linalg.solve(hessian, gradient)
        except np.linalg.LinAlgError:
            direction = -np.linalg.lstsq(hessian, gradient, rcond=None)[0]
        slope = float(gradient @ direction)
        if slope >= 0:
            direction, slope = -gradient, -float(gradient @ gradient)
        step = 1.0
        for _ in range(_MAX_HALVINGS):
            candidate = theta + step * direction
            candidate_loss = penalized_loss(candidate, Z, y, lam)
            if candidate_loss <= loss + _ARMIJO * step * slope:
                break
            step *= 0.5
        else:
            # loss differences below rounding: take the full step if it shrinks the gradient
            candidate = theta + direction
            candidate_norm = np.max(np.abs(penalized_gradient(candidate, Z, y, lam)))
            if not candidate_norm < gradient_norm:
                break
            candidate_loss = penalized_loss(candidate, Z, y, lam)
        theta, loss = candidate, candidate_loss
    raise ConvergenceError(
        "logistic regression did not converge",
        {"iterations": iteration, "loss": loss, "gradient_norm": gradient_norm},
    )


class LogisticRegressionModel(TrainedModel):
    kind = "logistic_regression"

    def __init__(self, spec, intercept: float, weights: np.ndarray, **kwargs):
        super().__init__(spec, **kwargs)
        self.intercept = float(intercept)
        self.weights = np.asarray(weights, dtype=float)

    def _margins(self, Z):
        return Z @ self.weights + self.intercept

    def parameters_to_dict(self) -> dict:
        return {"intercept": self.intercept, "weights": self.weights.tolist()}

    @classmethod
    def from_parameters(cls, spec, parameters, feature_names, training_seed, standardizer):
        return cls(
            spec,
            intercept=parameters["intercept"],
            weights=parameters["weights"],
            feature_names=feature_names,
            training_seed=training_seed,
            standardizer=standardizer,
        )


def train_logistic(
    spec: LogisticRegressionSpec, X: np.ndarray, y: np.ndarray, seed: int, feature_names
) -> LogisticRegressionModel:
    standardizer = Standardizer.fit(X, feature_names)
    theta = fit_logistic(standardizer.transform(X), y, spec.lam, spec.tol, spec.max_iter)
    return LogisticRegressionModel(
        spec,
        intercept=theta[0],
        weights=theta[1:],
        feature_names=feature_names,
        training_seed=seed,
        standardizer=standardizer,
    )
