from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class LearnerError(ValueError):
    pass


class DimensionMismatch(LearnerError):
    pass


class DegenerateProblemError(LearnerError):
    """The weighted least-squares system is singular (lambda = 0, rank-deficient data)."""


def as_feature_map(data) -> np.ndarray:
    x = np.asarray(data, dtype=float)
    if x.ndim == 2:
        x = x[:, :, None]
    if x.ndim != 3 or min(x.shape) < 1:
        raise LearnerError(f"feature map must be H x W x d, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise LearnerError("feature map contains non-finite values")
    return x


@dataclass(frozen=True, eq=False)
class TrainingSample:
    """One training sample.

    ``features`` is an ``H x W x d`` map with a confidence-map ``label`` for
    the filter learners, or a feature vector with ``cls`` in {-1, +1} for the
    SVM learner.
    """

    features: np.ndarray
    label: np.ndarray | None = None
    cls: int | None = None
    frame_index: int = 1

    def __post_init__(self):
        if (self.label is None) == (self.cls is None):
            raise LearnerError("exactly one of label / cls must be given")
        if self.label is not None:
            x = as_feature_map(self.features)
            y = np.asarray(self.label, dtype=float)
            if y.shape != x.shape[:2]:
                raise DimensionMismatch(
                    f"label shape {y.shape} does not match features {x.shape[:2]}")
            if not np.all(np.isfinite(y)):
                raise LearnerError("label contains non-finite values")
            object.__setattr__(self, "features", x)
            object.__setattr__(self, "label", y)
        else:
            if self.cls not in (-1, 1):
                raise LearnerError(f"class must be -1 or +1, got {self.cls!r}")
            x = np.asarray(self.features, dtype=float).ravel()
            if not np.all(np.isfinite(x)):
                raise LearnerError("feature vector contains non-finite values")
            object.__setattr__(self, "features", x)

    @property
    def shape(self):
        return self.features.shape

    # Spectra are cached: each stored sample is transformed once, then reused
    # by every retraining and loss evaluation.
    @cached_property
    def features_hat(self) -> np.ndarray:
        return np.fft.fft2(self.features, axes=(0, 1))

    @cached_property
    def label_hat(self) -> np.ndarray:
        return np.fft.fft2(self.label)


@dataclass(eq=False)
class FrameGroup:
    """All samples extracted from one frame (``n_k >= 1``)."""

    frame_index: int
    samples: list = field(default_factory=list)

    def __post_init__(self):
        if not self.samples:
            raise LearnerError("a frame group needs at least one sample")


@dataclass(eq=False)
class CorrelationFilter:
    coeffs: np.ndarray
    regularization_weight: float = 1e-2
    spatial_penalty: np.ndarray | None = None

    def __post_init__(self):
        self.coeffs = as_feature_map(self.coeffs)
        if self.regularization_weight < 0:
            raise LearnerError("regularization weight must be >= 0")
        if self.spatial_penalty is not None:
            w = np.asarray(self.spatial_penalty, dtype=float)
            if w.shape != self.coeffs.shape[:2]:
                raise DimensionMismatch("spatial penalty shape differs from filter")
            if np.any(w <= 0):
                raise LearnerError("spatial penalty must be strictly positive")
            self.spatial_penalty = w

    @classmethod
    def zeros(cls, shape, regularization_weight=1e-2):
        return cls(np.zeros(shape), regularization_weight)

    @cached_property
    def coeffs_hat(self) -> np.ndarray:
        return np.fft.fft2(self.coeffs, axes=(0, 1))

    def regularizer(self) -> float:
        """``R(theta)``: plain energy, or penalty-weighted energy when ``w`` is set."""
        if self.spatial_penalty is None:
            return float(np.sum(self.coeffs**2))
        return float(np.sum((self.spatial_penalty[:, :, None] * self.coeffs) ** 2))


@dataclass(eq=False)
class LinearSvmModel:
    weight_vector: np.ndarray
    bias: float = 0.0
    regularization_weight: float = 1e-2

    def __post_init__(self):
        self.weight_vector = np.asarray(self.weight_vector, dtype=float).ravel()
        if not (np.all(np.isfinite(self.weight_vector)) and np.isfinite(self.bias)):
            raise LearnerError("SVM parameters must be finite")

    def decision(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.weight_vector.size:
            raise DimensionMismatch(
                f"feature dimension {X.shape[1]} != model dimension {self.weight_vector.size}")
        return X @ self.weight_vector + self.bias

    def regularizer(self) -> float:
        return float(self.weight_vector @ self.weight_vector)
