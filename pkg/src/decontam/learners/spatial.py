"""Spatially penalized correlation filter solved by Gauss-Seidel sweeps.

Dense real normal equations, so only for small problems (``H*W*d <= 4096``).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .base import CorrelationFilter, DimensionMismatch, LearnerError
from .dcf import _check_samples, filter_frame_loss, flatten_groups

MAX_UNKNOWNS = 4096


def convolution_matrix(x: np.ndarray) -> np.ndarray:
    """Matrix ``C`` with ``C @ vec(f) = vec(sum_l f^l * x^l)`` (circular convolution).

    ``x`` is ``H x W x d``; ``vec(f)`` stacks channels, each row-major.
    """
    H, W, d = x.shape
    r = np.arange(H)
    c = np.arange(W)
    dr = (r[:, None] - r[None, :]) % H      # (n_r, m_r)
    dc = (c[:, None] - c[None, :]) % W      # (n_c, m_c)
    rows = dr[:, None, :, None]
    cols = dc[None, :, None, :]
    blocks = [x[:, :, l][rows, cols].reshape(H * W, H * W) for l in range(d)]
    return np.hstack(blocks)


def _vec(coeffs):
    return coeffs.transpose(2, 0, 1).ravel()


def _unvec(v, H, W, d):
    return v.reshape(d, H, W).transpose(1, 2, 0).copy()


def normal_equations(samples, alpha, spatial_penalty):
    """Dense ``(A, b)`` of the penalized weighted least-squares problem."""
    H, W, d = _check_samples(samples)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (len(samples),):
        raise DimensionMismatch(f"{len(samples)} samples but {alpha.size} weights")
    w = np.asarray(spatial_penalty, dtype=float)
    if w.shape != (H, W):
        raise DimensionMismatch(f"penalty shape {w.shape} != {(H, W)}")
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise LearnerError("spatial penalty must be finite and strictly positive")
    n = H * W * d
    if n > MAX_UNKNOWNS:
        raise LearnerError(f"{n} unknowns exceeds the dense solver bound {MAX_UNKNOWNS}")
    A = np.diag(np.tile((w**2).ravel(), d))
    b = np.zeros(n)
    for a_k, s in zip(alpha, samples):
        if a_k == 0:
            continue
        C = convolution_matrix(s.features)
        A += a_k * (C.T @ C)
        b += a_k * (C.T @ s.label.ravel())
    return A, b


def train_filter_spatial(samples, alpha, spatial_penalty, iterations: int,
                         warm_start: CorrelationFilter, return_history: bool = False):
    """Gauss-Seidel sweeps on the normal equations, starting from ``warm_start``.

    Minimizes ``sum_k a_k ||y_k - sum_l f^l * x_k^l||^2 + sum_l ||w . f^l||^2``
    approximately. With ``return_history`` the normal-equation residual norms
    (initial, then after each sweep) are returned as well.
    """
    H, W, d = _check_samples(samples)
    if warm_start.coeffs.shape != (H, W, d):
        raise DimensionMismatch("warm start shape differs from samples")
    if iterations < 0:
        raise LearnerError("iterations must be >= 0")
    A, b = normal_equations(samples, alpha, spatial_penalty)
    x = _vec(warm_start.coeffs)
    history = [float(np.linalg.norm(A @ x - b))]
    if iterations == 0:
        return (warm_start, history) if return_history else warm_start
    lower = np.tril(A)
    upper = np.triu(A, 1)
    for _ in range(iterations):
        x = solve_triangular(lower, b - upper @ x, lower=True, check_finite=False)
        history.append(float(np.linalg.norm(A @ x - b)))
    model = CorrelationFilter(_unvec(x, H, W, d), 0.0, np.asarray(spatial_penalty, dtype=float))
    return (model, history) if return_history else model


class SpatialFilterLearner:
    """Spatially penalized filter; warm-started Gauss-Seidel per update."""

    kind = "dcf-spatial"
    exact = False

    def __init__(self, spatial_penalty, iterations: int = 10):
        self.spatial_penalty = np.asarray(spatial_penalty, dtype=float)
        self.iterations = iterations

    def fit(self, groups, alpha, warm=None) -> CorrelationFilter:
        samples, weights = flatten_groups(groups, alpha)
        if warm is None:
            warm = CorrelationFilter(np.zeros(samples[0].shape), 0.0, self.spatial_penalty)
        return train_filter_spatial(samples, weights, self.spatial_penalty,
                                    self.iterations, warm)

    def frame_losses(self, model, groups) -> np.ndarray:
        return np.array([sum(filter_frame_loss(model, s) for s in g.samples) for g in groups])

    def regularizer(self, model) -> float:
        w = self.spatial_penalty[:, :, None]
        return float(np.sum((w * model.coeffs) ** 2))
