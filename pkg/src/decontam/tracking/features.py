"""Hand-crafted feature maps on a fixed grid around the target."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .types import Rect, SequenceError


@dataclass(frozen=True)
class FeatureConfig:
    grid: int = 48
    search_factor: float = 2.0
    orientation_bins: bool = False
    cosine_window: bool = True
    normalize: bool = True

    def __post_init__(self):
        if self.grid < 4:
            raise ValueError("grid must be >= 4")
        if self.search_factor <= 0:
            raise ValueError("search_factor must be positive")

    @property
    def channels(self) -> int:
        return 7 if self.orientation_bins else 3

    @property
    def center_cell(self):
        return (self.grid // 2, self.grid // 2)

    def cell_size(self, rect: Rect):
        """Pixels per grid cell along (rows, cols)."""
        return (self.search_factor * rect.h / self.grid, self.search_factor * rect.w / self.grid)


def sample_patch(frame: np.ndarray, rect: Rect, cfg: FeatureConfig) -> np.ndarray:
    """Bilinear resample of the search region; grid cell ``grid//2`` sits on the rect center.

    Pixels outside the frame replicate the nearest edge.
    """
    if not rect.intersects_frame(frame.shape):
        raise SequenceError(f"region {rect.as_tuple()} does not intersect the frame")
    cr, cc = rect.center
    sr, sc = cfg.cell_size(rect)
    offs = np.arange(cfg.grid) - cfg.grid // 2
    rows = cr + sr * offs
    cols = cc + sc * offs
    rr, ccs = np.meshgrid(rows, cols, indexing="ij")
    return map_coordinates(frame, [rr, ccs], order=1, mode="nearest")


def hann_window(n: int) -> np.ndarray:
    w = np.hanning(n)
    return np.outer(w, w)


def patch_features(patch: np.ndarray, cfg: FeatureConfig) -> np.ndarray:
    gray = patch - patch.mean()
    # Central differences; one-sided at the borders.
    gy, gx = np.gradient(patch)
    channels = [gray, gx, gy]
    if cfg.orientation_bins:
        mag = np.hypot(gx, gy)
        ang = np.arctan2(gy, gx)
        for b in range(4):
            centre = -np.pi + (b + 0.5) * np.pi / 2
            d = np.angle(np.exp(1j * (ang - centre)))
            channels.append(mag * np.maximum(0.0, 1.0 - np.abs(d) / (np.pi / 2)))
    x = np.stack(channels, axis=2)
    if cfg.cosine_window:
        x = x * hann_window(cfg.grid)[:, :, None]
    if cfg.normalize:
        energy = np.sqrt(np.sum(x**2))
        if energy > 1e-12:
            x = x / energy
    return x


def extract_features(frame, region: Rect, cfg: FeatureConfig = FeatureConfig()) -> np.ndarray:
    """``grid x grid x d`` feature map of the search region around ``region``.

    Channels: mean-removed grayscale, horizontal and vertical gradient, and
    optionally four soft orientation bins of the gradient.
    """
    return patch_features(sample_patch(np.asarray(frame, dtype=float), region, cfg), cfg)
