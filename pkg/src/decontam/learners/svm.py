"""Frame-weighted linear SVM (hinge loss) trained by full-batch sub-gradient descent."""

from __future__ import annotations

import numpy as np

from .base import DimensionMismatch, LearnerError, LinearSvmModel


def _stack(groups, alpha):
    alpha = np.asarray(alpha, dtype=float)
    if len(groups) == 0:
        raise LearnerError("empty sample set")
    if alpha.shape != (len(groups),):
        raise DimensionMismatch(f"{len(groups)} frames but {alpha.size} weights")
    X, y, c = [], [], []
    for g, a in zip(groups, alpha):
        for s in g.samples:
            if s.cls is None:
                raise LearnerError("SVM training needs class-labeled samples")
            X.append(s.features)
            y.append(s.cls)
            c.append(a)
    dims = {x.size for x in X}
    if len(dims) != 1:
        raise DimensionMismatch(f"inconsistent feature dimensions {sorted(dims)}")
    return np.vstack(X), np.asarray(y, dtype=float), np.asarray(c)


def svm_objective(model: LinearSvmModel, groups, alpha, lam: float) -> float:
    X, y, c = _stack(groups, alpha)
    margins = y * model.decision(X)
    return float(c @ np.maximum(0.0, 1.0 - margins) + lam * model.regularizer())


def train_svm(groups, alpha, lam: float = 1e-2, iterations: int = 2000,
              step: float | None = None, warm_start: LinearSvmModel | None = None,
              return_history: bool = False):
    """Minimize ``sum_k a_k sum_j hinge(y_jk (<w, x_jk> + b)) + lam ||w||^2``.

    Deterministic full-batch sub-gradient descent with step ``s / sqrt(i)``,
    returning the best iterate. The bias is not regularized.

    When ``step`` is None the scale ``s`` is chosen by a short probe over
    ``D/G * 10**-j`` (``j = 0..4``), where ``D = sqrt(m / lam)`` bounds the
    optimal weight norm, ``m`` is the total sample weight and ``G`` bounds
    the sub-gradient norm. With ``return_history`` the objective of every
    accepted (improving) iterate is returned too.
    """
    X, y, c = _stack(groups, alpha)
    n, dim = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    reg = np.ones(dim + 1)
    reg[-1] = 0.0
    if warm_start is not None:
        if warm_start.weight_vector.size != dim:
            raise DimensionMismatch("warm start dimension differs from samples")
        theta0 = np.append(warm_start.weight_vector, warm_start.bias)
    else:
        theta0 = np.zeros(dim + 1)
    cy = c * y

    def objective(th):
        return c @ np.maximum(0.0, 1.0 - y * (Xa @ th)) + lam * th[:dim] @ th[:dim]

    def descend(scale, budget):
        theta = theta0.copy()
        best, best_f = theta.copy(), objective(theta)
        history = [best_f]
        for i in range(1, budget + 1):
            active = y * (Xa @ theta) < 1.0
            g = -(cy * active) @ Xa + 2.0 * lam * reg * theta
            if not np.any(g):
                break
            theta = theta - (scale / np.sqrt(i)) * g
            f = objective(theta)
            if f < best_f:
                best, best_f = theta.copy(), f
                history.append(best_f)
        return best, history

    if step is None:
        mass = max(c.sum(), np.finfo(float).tiny)
        radius = np.sqrt(mass / lam) if lam > 0 else 1.0 / np.finfo(float).eps
        gbound = max(mass * np.linalg.norm(Xa, axis=1).max(), np.finfo(float).tiny)
        probe = max(50, iterations // 10)
        candidates = [radius / gbound * 10.0**-j for j in range(5)]
        step = min(candidates, key=lambda s: descend(s, probe)[1][-1])
    best, history = descend(step, iterations)
    model = LinearSvmModel(best[:dim], float(best[dim]), lam)
    return (model, history) if return_history else model


def svm_frame_loss(model: LinearSvmModel, samples) -> float:
    """Sum of hinge losses over one frame's samples."""
    X = np.vstack([s.features for s in samples])
    y = np.array([s.cls for s in samples], dtype=float)
    return float(np.sum(np.maximum(0.0, 1.0 - y * model.decision(X))))


class SvmLearner:
    kind = "svm"
    exact = False

    def __init__(self, lam: float = 1e-2, iterations: int = 500, step: float | None = None):
        self.lam = lam
        self.iterations = iterations
        self.step = step

    def fit(self, groups, alpha, warm=None) -> LinearSvmModel:
        return train_svm(groups, alpha, self.lam, self.iterations, self.step, warm)

    def frame_losses(self, model, groups) -> np.ndarray:
        return np.array([svm_frame_loss(model, g.samples) for g in groups])

    def regularizer(self, model) -> float:
        return self.lam * model.regularizer()
