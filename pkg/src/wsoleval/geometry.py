"""Axis-aligned bounding boxes and exact IoU.

Boxes use half-open integer pixel intervals [x0, x1) x [y0, y1), so areas
and intersections are exact integer pixel counts.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BoundingBox:
    """Half-open pixel box. Zero-area boxes are rejected at construction."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self) -> None:
        for name in ("x0", "y0", "x1", "y1"):
            v = getattr(self, name)
            if not isinstance(v, int):
                raise TypeError(f"box coordinate {name} must be int, got {type(v).__name__}")
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError(f"box coordinates must be non-negative: {self}")
        if self.x0 >= self.x1 or self.y0 >= self.y1:
            raise ValueError(f"box must have positive area: {self}")

    @property
    def area(self) -> int:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.x1, self.y1)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union on integer pixel counts.

    Exact up to one float division; both operands are exact integers.
    """
    iw = min(a.x1, b.x1) - max(a.x0, b.x0)
    ih = min(a.y1, b.y1) - max(a.y0, b.y0)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    return inter / union
