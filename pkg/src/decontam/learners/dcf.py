"""Multi-channel correlation filter trained in the Fourier domain.

Per-sample loss is ``|| y - sum_l f^l * x^l ||^2`` with ``*`` circular
convolution; the weighted ridge problem decouples into one ``d x d`` complex
system per discrete frequency.
"""

from __future__ import annotations

import numpy as np

from .base import (CorrelationFilter, DegenerateProblemError, DimensionMismatch,
                   LearnerError, TrainingSample, as_feature_map)

# Relative eigenvalue floor below which an unregularized system counts as singular.
_SINGULAR_RTOL = 1e-12


def make_gaussian_label(H: int, W: int, center, sigma: float) -> np.ndarray:
    """Periodic Gaussian with peak 1 at ``center`` = (row, col).

    Distances wrap around the grid edges, consistent with circular convolution.
    """
    if sigma <= 0:
        raise LearnerError("sigma must be positive")
    r0, c0 = center
    if not (0 <= r0 < H and 0 <= c0 < W):
        raise LearnerError(f"center {center} outside {H}x{W} grid")
    dr = np.abs(np.arange(H) - r0)
    dr = np.minimum(dr, H - dr)
    dc = np.abs(np.arange(W) - c0)
    dc = np.minimum(dc, W - dc)
    return np.exp(-(dr[:, None] ** 2 + dc[None, :] ** 2) / (2.0 * sigma**2))


def _check_samples(samples):
    if not samples:
        raise LearnerError("no training samples")
    shape = samples[0].shape
    for s in samples:
        if s.label is None:
            raise LearnerError("filter training needs label maps")
        if s.shape != shape:
            raise DimensionMismatch(f"sample shapes differ: {s.shape} vs {shape}")
    return shape


def _real_part(z: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(z.real)


def train_filter(samples, alpha, lam: float = 1e-2) -> CorrelationFilter:
    """Exact minimizer of ``sum_k a_k ||y_k - sum_l f^l * x_k^l||^2 + lam ||f||^2``.

    Raises
    ------
    DegenerateProblemError
        If ``lam == 0`` and some frequency has a rank-deficient system.
    """
    H, W, d = _check_samples(samples)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (len(samples),):
        raise DimensionMismatch(f"{len(samples)} samples but {alpha.size} weights")
    if lam < 0:
        raise LearnerError("lambda must be >= 0")
    t = len(samples)
    # (HW, t, d) and (HW, t) frequency-major layouts
    X = np.stack([s.features_hat for s in samples]).reshape(t, H * W, d).transpose(1, 0, 2)
    Y = np.stack([s.label_hat for s in samples]).reshape(t, H * W).T
    Xc = np.conj(X).transpose(0, 2, 1)
    A = Xc @ (alpha[None, :, None] * X)
    b = Xc @ (alpha[None, :] * Y)[:, :, None]
    idx = np.arange(d)
    A[:, idx, idx] += lam
    if lam == 0:
        eig = np.linalg.eigvalsh(A)
        scale = max(eig.max(), np.finfo(float).tiny)
        if eig[:, 0].min() <= _SINGULAR_RTOL * scale:
            raise DegenerateProblemError(
                "singular per-frequency system; use lambda > 0 or more varied samples")
    F = np.linalg.solve(A, b)[:, :, 0].reshape(H, W, d)
    coeffs = _real_part(np.fft.ifft2(F, axes=(0, 1)))
    return CorrelationFilter(coeffs, lam)


def _response_hat(model: CorrelationFilter, features_hat: np.ndarray) -> np.ndarray:
    if features_hat.shape != model.coeffs.shape:
        raise DimensionMismatch(
            f"features {features_hat.shape} do not match filter {model.coeffs.shape}")
    return np.sum(model.coeffs_hat * features_hat, axis=2)


def filter_confidence(model: CorrelationFilter, features) -> np.ndarray:
    """Confidence map ``sum_l f^l * x^l`` (real, same H x W as the input)."""
    if isinstance(features, TrainingSample):
        xh = features.features_hat
    else:
        xh = np.fft.fft2(as_feature_map(features), axes=(0, 1))
    return _real_part(np.fft.ifft2(_response_hat(model, xh)))


def filter_frame_loss(model: CorrelationFilter, sample: TrainingSample) -> float:
    """Squared reconstruction error of one sample, evaluated with Parseval's formula."""
    if sample.label is None:
        raise LearnerError("filter loss needs a label map")
    H, W = sample.label.shape
    r = sample.label_hat - _response_hat(model, sample.features_hat)
    return float(np.sum(r.real**2 + r.imag**2) / (H * W))


def filter_frame_losses(model: CorrelationFilter, samples) -> np.ndarray:
    return np.array([filter_frame_loss(model, s) for s in samples])


def flatten_groups(groups, alpha):
    """Samples of all frames with each frame's weight repeated per sample."""
    samples, weights = [], []
    for g, a in zip(groups, alpha):
        samples.extend(g.samples)
        weights.extend([a] * len(g.samples))
    return samples, np.asarray(weights, dtype=float)


class FilterLearner:
    """Ridge-regularized correlation filter, exact per-frequency solve."""

    kind = "dcf"
    exact = True

    def __init__(self, lam: float = 1e-2):
        self.lam = lam

    def fit(self, groups, alpha, warm=None) -> CorrelationFilter:
        samples, weights = flatten_groups(groups, alpha)
        return train_filter(samples, weights, self.lam)

    def frame_losses(self, model, groups) -> np.ndarray:
        return np.array([sum(filter_frame_loss(model, s) for s in g.samples) for g in groups])

    def regularizer(self, model) -> float:
        return self.lam * model.regularizer()
