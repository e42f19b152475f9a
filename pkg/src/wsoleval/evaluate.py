"""High-level evaluation: manifest + score-map directory -> metric report.

Shared by the CLI and the HTTP service so both surfaces produce identical
numbers for identical inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import boxmetrics, maskmetrics
from .boxmetrics import BoxEvalRecord
from .dataio import SplitManifest, load_scoremap, resolve_scoremap, load_mask
from .maskmetrics import MaskEvalRecord
from .scoremaps import (
    DEFAULT_CONNECTIVITY,
    DEFAULT_GRID_SPACING,
    ThresholdGrid,
    normalize_max,
    normalize_minmax,
    resize_bilinear,
)

METRICS = ("maxboxacc", "maxboxaccv2", "pxap")


@dataclass(frozen=True)
class EvalConfig:
    grid_spacing: float = DEFAULT_GRID_SPACING
    exact_thresholds: bool = False
    connectivity: int = DEFAULT_CONNECTIVITY
    normalization: str = "minmax"  # minmax | max | none
    resize_order: str = "calibrate-first"  # calibrate-first | resize-first
    deltas: tuple[float, ...] = (0.5,)
    threads: int = 1

    def __post_init__(self) -> None:
        if self.normalization not in ("minmax", "max", "none"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.resize_order not in ("calibrate-first", "resize-first"):
            raise ValueError(f"unknown resize order {self.resize_order!r}")


def calibrate_and_resize(raw: np.ndarray, height: int, width: int, config: EvalConfig) -> np.ndarray:
    def calibrate(s):
        if config.normalization == "minmax":
            return normalize_minmax(s)
        if config.normalization == "max":
            return normalize_max(s)
        if s.min() < 0.0 or s.max() > 1.0:
            raise ValueError("normalization 'none' requires scores already in [0, 1]")
        return s

    if config.resize_order == "calibrate-first":
        return resize_bilinear(calibrate(raw), height, width)
    return calibrate(resize_bilinear(raw, height, width))


def load_box_records(manifest: SplitManifest, scoremap_dir, config: EvalConfig) -> list[BoxEvalRecord]:
    records = []
    for e in manifest.entries:
        if e.kind != "boxes":
            raise ValueError(f"image {e.image_id!r} has mask annotation; box metric expects boxes")
        raw = load_scoremap(resolve_scoremap(scoremap_dir, e.image_id))
        s = calibrate_and_resize(raw, e.height, e.width, config)
        records.append(BoxEvalRecord(image_id=e.image_id, score_map=s, gt_boxes=e.boxes))
    return records


def load_mask_records(manifest: SplitManifest, scoremap_dir, config: EvalConfig) -> list[MaskEvalRecord]:
    records = []
    for e in manifest.entries:
        if e.kind != "masks":
            raise ValueError(f"image {e.image_id!r} has box annotation; pxap expects masks")
        raw = load_scoremap(resolve_scoremap(scoremap_dir, e.image_id))
        s = calibrate_and_resize(raw, e.height, e.width, config)
        ignore = load_mask(e.ignore_path) if e.ignore_path else None
        records.append(MaskEvalRecord(image_id=e.image_id, score_map=s,
                                      gt_mask=load_mask(e.mask_path), ignore_mask=ignore))
    return records


@dataclass(frozen=True)
class EvalReport:
    metric: str
    value: float
    n_images: int
    per_delta: dict[float, tuple[float, float]] = field(default_factory=dict)  # delta -> (max, tau*)
    config: EvalConfig = EvalConfig()

    def render(self) -> str:
        lines = [
            f"metric {self.metric}",
            f"value {self.value:.6f}",
            f"n_images {self.n_images}",
        ]
        for d in sorted(self.per_delta):
            mx, tau = self.per_delta[d]
            lines.append(f"delta {d:g} max {mx:.6f} tau_star {tau:.6f}")
        c = self.config
        lines.append(
            "config grid_spacing={:g} exact_thresholds={} connectivity={} "
            "normalization={} resize_order={}".format(
                c.grid_spacing, str(c.exact_thresholds).lower(), c.connectivity,
                c.normalization, c.resize_order,
            )
        )
        return "\n".join(lines) + "\n"


def _grid_for(records, config: EvalConfig, score_maps=None) -> ThresholdGrid:
    if config.exact_thresholds:
        if score_maps is None:
            score_maps = [r.score_map for r in records]
        return ThresholdGrid.exact(score_maps)
    return ThresholdGrid.from_spacing(config.grid_spacing)


def evaluate_box_records(records, metric: str, config: EvalConfig):
    """Returns (EvalReport, BoxAccCurve)."""
    grid = _grid_for(records, config)
    if metric == "maxboxacc":
        deltas = config.deltas or (boxmetrics.DEFAULT_DELTA,)
        curve = boxmetrics.box_acc(records, grid, deltas=deltas,
                                   connectivity=config.connectivity, threads=config.threads)
        head = boxmetrics.max_box_acc(curve, deltas[0])
        per = {d: (m.value, m.tau_star)
               for d, m in ((d, boxmetrics.max_box_acc(curve, d)) for d in deltas)}
        report = EvalReport(metric=metric, value=head.value, n_images=len(records),
                            per_delta=per, config=config)
    elif metric == "maxboxaccv2":
        deltas = config.deltas if len(config.deltas) > 1 else boxmetrics.V2_DELTAS
        curve = boxmetrics.box_acc_v2(records, grid, deltas=deltas,
                                      connectivity=config.connectivity, threads=config.threads)
        res = boxmetrics.max_box_acc_v2(curve, deltas=deltas)
        per = {d: (m.value, m.tau_star) for d, m in res.per_delta.items()}
        report = EvalReport(metric=metric, value=res.value, n_images=len(records),
                            per_delta=per, config=config)
    else:
        raise ValueError(f"unknown box metric {metric!r}")
    return report, curve


def evaluate_mask_records(records, config: EvalConfig):
    """Returns (EvalReport, PrCurve)."""
    if config.exact_thresholds:
        grid = maskmetrics.exact_grid(records)
    else:
        grid = ThresholdGrid.from_spacing(config.grid_spacing)
    curve = maskmetrics.px_pr_curve(records, grid, threads=config.threads)
    report = EvalReport(metric="pxap", value=curve.ap, n_images=len(records), config=config)
    return report, curve


def evaluate(manifest: SplitManifest, scoremap_dir, metric: str, config: EvalConfig):
    """Full pipeline for one manifest. Returns (EvalReport, curve)."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if metric == "pxap":
        return evaluate_mask_records(load_mask_records(manifest, scoremap_dir, config), config)
    records = load_box_records(manifest, scoremap_dir, config)
    if metric == "maxboxaccv2" and config.deltas == (0.5,):
        config = replace(config, deltas=boxmetrics.V2_DELTAS)
    return evaluate_box_records(records, metric, config)
