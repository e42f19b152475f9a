"""Score-map calibration, resizing, thresholding and connected components.

Score maps are (H, W) float64 arrays; binary masks are (H, W) uint8 arrays
with values in {0, 1}. All operations are pure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import BoundingBox

DEFAULT_GRID_SPACING = 0.001
DEFAULT_CONNECTIVITY = 8


def as_score_map(values) -> np.ndarray:
    """Validate and convert to a (H, W) float64 score map."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"score map must be a non-empty 2-d grid, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("score map contains non-finite values")
    return arr


def as_binary_mask(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"mask must be a non-empty 2-d grid, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("mask values must be 0 or 1")
    return arr.astype(np.uint8)


@dataclass(frozen=True)
class ThresholdGrid:
    """Ascending threshold sweep, either a fixed spacing or the distinct
    values of the score maps under evaluation ("exact" mode)."""

    thresholds: tuple[float, ...]
    mode: str  # "grid" | "exact"

    def __post_init__(self) -> None:
        if self.mode not in ("grid", "exact"):
            raise ValueError(f"unknown threshold mode {self.mode!r}")
        ts = np.asarray(self.thresholds, dtype=np.float64)
        if ts.size == 0 or np.any(np.diff(ts) <= 0):
            raise ValueError("thresholds must be non-empty and strictly ascending")

    @classmethod
    def from_spacing(cls, spacing: float = DEFAULT_GRID_SPACING) -> "ThresholdGrid":
        if not 0.0 < spacing <= 1.0:
            raise ValueError(f"grid spacing must be in (0, 1], got {spacing}")
        n = int(np.ceil(1.0 / spacing))
        return cls(tuple(l * spacing for l in range(n + 1)), "grid")

    @classmethod
    def exact(cls, score_maps) -> "ThresholdGrid":
        """Distinct pooled values of the given score maps."""
        pooled = np.unique(np.concatenate([np.asarray(s, dtype=np.float64).ravel() for s in score_maps]))
        return cls(tuple(pooled), "exact")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.thresholds, dtype=np.float64)


def normalize_minmax(s: np.ndarray) -> np.ndarray:
    """Map scores affinely onto [0, 1]; a constant map becomes all zeros
    (an uninformative map should predict no foreground at any tau > 0)."""
    s = as_score_map(s)
    lo, hi = s.min(), s.max()
    if hi == lo:
        return np.zeros_like(s)
    return (s - lo) / (hi - lo)


def normalize_max(s: np.ndarray) -> np.ndarray:
    """Divide through by the maximum score. Requires max > 0."""
    s = as_score_map(s)
    hi = s.max()
    if hi <= 0:
        raise ValueError(f"max normalization needs a positive maximum, got {hi}")
    return s / hi


def resize_bilinear(s: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Pixel-center-aligned bilinear resize.

    Output pixel (i, j) samples source coordinate ((i + 0.5) * H/out_h - 0.5,
    (j + 0.5) * W/out_w - 0.5), clamped to the source grid.
    """
    s = as_score_map(s)
    if out_h < 1 or out_w < 1:
        raise ValueError("output dimensions must be positive")
    h, w = s.shape
    if (out_h, out_w) == (h, w):
        return s.copy()

    def _coords(n_out: int, n_in: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        x = np.clip(x, 0.0, n_in - 1.0)
        lo = np.floor(x).astype(np.intp)
        lo = np.minimum(lo, n_in - 2) if n_in > 1 else np.zeros_like(lo)
        frac = x - lo if n_in > 1 else np.zeros_like(x)
        return lo, lo + 1 if n_in > 1 else lo, frac

    yi0, yi1, fy = _coords(out_h, h)
    xi0, xi1, fx = _coords(out_w, w)
    fy = fy[:, None]
    fx = fx[None, :]
    top = s[yi0][:, xi0] * (1 - fx) + s[yi0][:, xi1] * fx
    bot = s[yi1][:, xi0] * (1 - fx) + s[yi1][:, xi1] * fx
    return top * (1 - fy) + bot * fy


def threshold(s: np.ndarray, tau: float) -> np.ndarray:
    """Binary mask of {s >= tau} (boundary included)."""
    s = as_score_map(s)
    return (s >= tau).astype(np.uint8)


@dataclass(frozen=True)
class ComponentSet:
    """Connected-component labeling of a binary mask.

    Labels are assigned in row-major order of each component's first pixel;
    0 is background.
    """

    labels: np.ndarray
    count: int
    connectivity: int


_STRUCTURES = {
    4: np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool),
    8: np.ones((3, 3), dtype=bool),
}


def connected_components(mask: np.ndarray, connectivity: int = DEFAULT_CONNECTIVITY) -> ComponentSet:
    mask = as_binary_mask(mask)
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    raw, count = ndimage.label(mask, structure=_STRUCTURES[connectivity])
    if count > 0:
        # relabel by row-major first occurrence so labeling is deterministic
        # regardless of the backend's internal order
        flat = raw.ravel()
        first = np.full(count + 1, flat.size, dtype=np.intp)
        nz = np.flatnonzero(flat)
        # reversed so earlier indices overwrite later ones
        first[flat[nz[::-1]]] = nz[::-1]
        order = np.argsort(first[1:], kind="stable")
        remap = np.zeros(count + 1, dtype=np.int32)
        remap[1:][order] = np.arange(1, count + 1, dtype=np.int32)
        raw = remap[raw]
    return ComponentSet(labels=raw.astype(np.int32), count=int(count), connectivity=connectivity)


def component_boxes(components: ComponentSet) -> list[tuple[BoundingBox, int]]:
    """Tight half-open box and pixel area per component, largest area first
    (ties broken by ascending label)."""
    out = []
    labels = components.labels
    for lbl in range(1, components.count + 1):
        ys, xs = np.nonzero(labels == lbl)
        box = BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
        out.append((box, int(ys.size), lbl))
    out.sort(key=lambda t: (-t[1], t[2]))
    return [(box, area) for box, area, _ in out]
