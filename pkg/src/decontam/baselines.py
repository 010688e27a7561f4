"""Comparison strategies: fixed exponential decay and PSR sample gating."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PsrError(ValueError):
    pass


class ZeroVarianceError(PsrError):
    """Sidelobe region is constant, so the PSR is undefined."""


@dataclass(frozen=True)
class DecayConfig:
    gamma: float = 0.035
    # Optional window: beyond this age weights stop decaying.
    window: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if self.window is not None and self.window < 1:
            raise ValueError("window must be >= 1")


@dataclass(frozen=True)
class PsrConfig:
    exclusion_radius: int = 2
    threshold: float = 5.0

    def __post_init__(self):
        if self.exclusion_radius < 0:
            raise ValueError("exclusion_radius must be >= 0")
        if math.isnan(self.threshold) or self.threshold == math.inf:
            raise ValueError("threshold must be finite or -inf")


def decay_weights_from_ages(ages, gamma: float, window: int | None = None) -> np.ndarray:
    ages = np.asarray(ages, dtype=float)
    if window is not None:
        ages = np.minimum(ages, window)
    if gamma == 1.0:
        w = (ages == 0).astype(float)
    else:
        w = (1.0 - gamma) ** ages
    return w / w.sum()


def decay_weights(t: int, gamma: float, window: int | None = None) -> np.ndarray:
    """``alpha_k`` proportional to ``(1 - gamma)**(t - k)``, oldest first.

    >>> decay_weights(3, 0.5)
    array([0.14285714, 0.28571429, 0.57142857])
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    return decay_weights_from_ages(np.arange(t - 1, -1, -1), gamma, window)


def sidelobe_mask(shape, peak, radius: int) -> np.ndarray:
    """Cells farther than ``radius`` from ``peak`` (Chebyshev distance, wrapped)."""
    H, W = shape
    dr = np.abs(np.arange(H) - peak[0])
    dr = np.minimum(dr, H - dr)
    dc = np.abs(np.arange(W) - peak[1])
    dc = np.minimum(dc, W - dc)
    return np.maximum(dr[:, None], dc[None, :]) > radius


def psr(confidence, cfg: PsrConfig = PsrConfig()) -> float:
    """Peak-to-sidelobe ratio ``(g_max - m_r) / s_r`` (population std)."""
    g = np.asarray(confidence, dtype=float)
    if g.ndim != 2 or g.size == 0:
        raise PsrError("confidence map must be a non-empty 2-D array")
    peak = np.unravel_index(np.argmax(g), g.shape)
    mask = sidelobe_mask(g.shape, peak, cfg.exclusion_radius)
    if not mask.any():
        raise PsrError(
            f"exclusion radius {cfg.exclusion_radius} leaves no sidelobe in a {g.shape} map")
    side = g[mask]
    m = side.mean()
    s = side.std()
    # Treat spread at rounding level as constant.
    if s <= 1e-12 * np.abs(side).max():
        raise ZeroVarianceError("constant sidelobe region")
    return float((g[peak] - m) / s)


def psr_gate(confidence, cfg: PsrConfig = PsrConfig()) -> bool:
    """True to accept the frame's sample; degenerate maps are rejected."""
    if cfg.threshold == -math.inf:
        return True
    try:
        return psr(confidence, cfg) >= cfg.threshold
    except ZeroVarianceError:
        return False
