from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Rect:
    """Axis-aligned box, OTB convention: 1-based top-left ``(x, y)`` and extent."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"rect extents must be positive, got w={self.w}, h={self.h}")

    @property
    def center(self):
        """Center in 0-based array coordinates ``(row, col)``."""
        return (self.y - 1 + (self.h - 1) / 2.0, self.x - 1 + (self.w - 1) / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h

    def translated(self, dx: float, dy: float) -> "Rect":
        return Rect(self.x + dx, self.y + dy, self.w, self.h)

    def intersects_frame(self, shape) -> bool:
        H, W = shape[:2]
        return (self.x - 1 < W and self.x - 1 + self.w > 0
                and self.y - 1 < H and self.y - 1 + self.h > 0)

    def as_tuple(self):
        return (self.x, self.y, self.w, self.h)
