from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rect import Rect  # noqa: F401  (re-export)


class SequenceError(ValueError):
    pass


@dataclass
class Sequence:
    frames: list
    ground_truth: list
    corruption_labels: list | None = None
    name: str = "sequence"

    def __post_init__(self):
        if len(self.frames) != len(self.ground_truth):
            raise SequenceError(
                f"{len(self.frames)} frames but {len(self.ground_truth)} ground-truth rects")
        if self.corruption_labels is not None and len(self.corruption_labels) != len(self.frames):
            raise SequenceError("corruption labels do not match frame count")

    def __len__(self):
        return len(self.frames)


@dataclass(frozen=True)
class OcclusionEvent:
    start: int
    end: int
    fraction: float = 1.0
    mode: str = "background"

    MODES = ("background", "noise", "constant", "occluder")

    def __post_init__(self):
        if self.start < 1 or self.end < self.start:
            raise ValueError(f"bad occlusion interval {self.start}:{self.end}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"occlusion fraction {self.fraction} outside [0, 1]")
        if self.mode not in self.MODES:
            raise ValueError(f"unknown occlusion mode {self.mode!r}")


@dataclass(frozen=True)
class CorruptionScript:
    """Recipe for a synthetic sequence; frame numbers are 1-based."""

    length: int = 100
    target_size: int = 24
    frame_size: tuple = (120, 160)
    occlusions: tuple = ()
    jitter_std: float = 0.0
    jitter_threshold: float = 3.0
    drift_rate: float = 0.0
    noise_std: float = 0.0
    speed: float = 0.5

    def __post_init__(self):
        if self.length < 1:
            raise SequenceError("length must be >= 1")
        if self.target_size < 1:
            raise SequenceError("degenerate script: zero-size target")
        H, W = self.frame_size
        if H < 2 * self.target_size or W < 2 * self.target_size:
            raise SequenceError("frame too small for the target")
        for ev in self.occlusions:
            if ev.end > self.length:
                raise SequenceError(f"occlusion {ev.start}:{ev.end} beyond length {self.length}")
        for name in ("jitter_std", "drift_rate", "noise_std", "speed"):
            if getattr(self, name) < 0:
                raise SequenceError(f"{name} must be >= 0")
