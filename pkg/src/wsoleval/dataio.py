"""Manifests, splits and on-disk formats.

Manifest: line-oriented JSON. The first line is a header object
{"split": "<name>"}; each following line is one entry:

    {"image_id": "...", "width": W, "height": H, "boxes": [[x0,y0,x1,y1], ...]}
    {"image_id": "...", "width": W, "height": H, "mask": "rel.png", "ignore": "rel.png"}

Box coordinates are half-open pixel intervals. Mask/ignore paths are
relative to the manifest file. Validation is eager: every referenced file
must exist and parse at load time.

Raw score-map format (.wsm): magic b"WSLM", version byte 1, three zero pad
bytes, uint32-le height, uint32-le width, then H*W float32-le values in
row-major order. 8-bit grayscale images are also accepted (value / 255).
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .geometry import BoundingBox

SPLITS = ("train-weaksup", "train-fullsup", "test")

_MAGIC = b"WSLM"
_VERSION = 1


class ManifestError(ValueError):
    """Malformed manifest; the message names the offending line or id."""


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    width: int
    height: int
    boxes: tuple[BoundingBox, ...] | None = None
    mask_path: Path | None = None
    ignore_path: Path | None = None

    @property
    def kind(self) -> str:
        return "boxes" if self.boxes is not None else "masks"


@dataclass(frozen=True)
class SplitManifest:
    split: str
    entries: tuple[ManifestEntry, ...]
    base_dir: Path


def load_manifest(path) -> SplitManifest:
    path = Path(path)
    base = path.parent
    lines = path.read_text().splitlines()
    if not lines:
        raise ManifestError(f"{path}: empty manifest")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise ManifestError(f"{path}:1: bad header: {e}") from e
    split = header.get("split")
    if split not in SPLITS:
        raise ManifestError(f"{path}:1: split must be one of {SPLITS}, got {split!r}")

    entries = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as e:
            raise ManifestError(f"{path}:{lineno}: bad JSON: {e}") from e
        try:
            entry = _parse_entry(d, base)
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestError(f"{path}:{lineno}: {e}") from e
        if entry.image_id in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate image_id {entry.image_id!r}")
        seen.add(entry.image_id)
        entries.append(entry)
    return SplitManifest(split=split, entries=tuple(entries), base_dir=base)


def _parse_entry(d: dict, base: Path) -> ManifestEntry:
    image_id = str(d["image_id"])
    width = int(d["width"])
    height = int(d["height"])
    if width < 1 or height < 1:
        raise ValueError(f"image {image_id!r}: non-positive dimensions")
    if ("boxes" in d) == ("mask" in d):
        raise ValueError(f"image {image_id!r}: exactly one of 'boxes' or 'mask' required")
    if "boxes" in d:
        if not d["boxes"]:
            raise ValueError(f"image {image_id!r}: box list must be non-empty")
        boxes = tuple(BoundingBox(*map(int, b)) for b in d["boxes"])
        for b in boxes:
            if b.x1 > width or b.y1 > height:
                raise ValueError(f"image {image_id!r}: box {b} exceeds the {height}x{width} frame")
        return ManifestEntry(image_id=image_id, width=width, height=height, boxes=boxes)
    mask_path = base / d["mask"]
    mask = load_mask(mask_path)  # eager validation
    if mask.shape != (height, width):
        raise ValueError(
            f"image {image_id!r}: mask {mask_path} is {mask.shape}, manifest says {(height, width)}"
        )
    ignore_path = None
    if d.get("ignore"):
        ignore_path = base / d["ignore"]
        ign = load_mask(ignore_path)
        if ign.shape != (height, width):
            raise ValueError(f"image {image_id!r}: ignore mask dimension mismatch")
    return ManifestEntry(image_id=image_id, width=width, height=height,
                         mask_path=mask_path, ignore_path=ignore_path)


def check_disjoint(manifests) -> dict[str, list[str]]:
    """image_ids appearing in more than one split -> list of split names.
    Empty dict means the protocol's disjointness requirement holds."""
    by_id: dict[str, list[str]] = {}
    for m in manifests:
        for e in m.entries:
            by_id.setdefault(e.image_id, []).append(m.split)
    return {iid: splits for iid, splits in by_id.items() if len(splits) > 1}


# ---------------------------------------------------------------------------
# score maps and masks


def write_scoremap(path, s: np.ndarray) -> None:
    s = np.asarray(s, dtype=np.float32)
    if s.ndim != 2:
        raise ValueError("score map must be 2-d")
    h, w = s.shape
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(bytes([_VERSION, 0, 0, 0]))
        f.write(struct.pack("<II", h, w))
        f.write(s.astype("<f4").tobytes(order="C"))


def load_scoremap(path, expected_h: int | None = None, expected_w: int | None = None) -> np.ndarray:
    path = Path(path)
    with open(path, "rb") as f:
        head = f.read(4)
        if head == _MAGIC:
            ver = f.read(4)
            if not ver or ver[0] != _VERSION:
                raise ValueError(f"{path}: unsupported score-map version {ver[:1]!r}")
            h, w = struct.unpack("<II", f.read(8))
            data = np.frombuffer(f.read(4 * h * w), dtype="<f4")
            if data.size != h * w:
                raise ValueError(f"{path}: truncated score map")
            s = data.reshape(h, w).astype(np.float64)
        else:
            img = Image.open(path)
            if img.mode != "L":
                img = img.convert("L")
            s = np.asarray(img, dtype=np.float64) / 255.0
    if not np.all(np.isfinite(s)):
        raise ValueError(f"{path}: non-finite score values")
    if expected_h is not None and s.shape != (expected_h, expected_w):
        raise ValueError(f"{path}: score map is {s.shape}, expected {(expected_h, expected_w)}")
    return s


def resolve_scoremap(directory, image_id: str) -> Path:
    """Resolution order: <image_id>.wsm first, then <image_id>.png."""
    directory = Path(directory)
    for ext in (".wsm", ".png"):
        p = directory / f"{image_id}{ext}"
        if p.exists():
            return p
    raise FileNotFoundError(f"no score map for {image_id!r} in {directory}")


def load_mask(path) -> np.ndarray:
    """8-bit grayscale mask: 255 = foreground/ignore, 0 = background."""
    img = Image.open(path)
    if img.mode != "L":
        img = img.convert("L")
    arr = np.asarray(img)
    if not np.isin(arr, (0, 255)).all():
        raise ValueError(f"{path}: mask values must be 0 or 255")
    return (arr == 255).astype(np.uint8)


def write_mask(path, mask: np.ndarray) -> None:
    arr = (np.asarray(mask, dtype=np.uint8) * 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)
