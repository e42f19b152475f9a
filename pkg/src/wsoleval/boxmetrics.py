"""Box-based localization metrics.

BoxAcc(tau, delta) thresholds a calibrated score map at tau, takes the
largest connected component's tight box and counts the image as correct
when it overlaps some ground-truth box with IoU >= delta. The V2 variant
matches the boxes of *all* components against all ground-truth boxes.
MaxBoxAcc maximizes over tau; MaxBoxAccV2 averages the per-delta maxima
over delta in {0.3, 0.5, 0.7}.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import BoundingBox, iou
from .scoremaps import (
    DEFAULT_CONNECTIVITY,
    ThresholdGrid,
    as_score_map,
    component_boxes,
    connected_components,
    threshold,
)

DEFAULT_DELTA = 0.5
V2_DELTAS = (0.3, 0.5, 0.7)


@dataclass(frozen=True)
class BoxEvalRecord:
    """One image: calibrated score map at ground-truth resolution plus its
    ground-truth boxes (at least one)."""

    image_id: str
    score_map: np.ndarray
    gt_boxes: tuple[BoundingBox, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "score_map", as_score_map(self.score_map))
        if not self.gt_boxes:
            raise ValueError(f"record {self.image_id!r} has no ground-truth boxes")
        h, w = self.score_map.shape
        for b in self.gt_boxes:
            if b.x1 > w or b.y1 > h:
                raise ValueError(f"record {self.image_id!r}: box {b} exceeds the {h}x{w} frame")


@dataclass(frozen=True)
class BoxAccCurve:
    deltas: tuple[float, ...]
    thresholds: ThresholdGrid
    acc: np.ndarray  # shape (len(deltas), len(thresholds))
    n_images: int

    def row(self, delta: float) -> np.ndarray:
        for i, d in enumerate(self.deltas):
            if d == delta:
                return self.acc[i]
        raise KeyError(f"delta {delta} not in curve (have {self.deltas})")


def _best_iou_per_level(score_map: np.ndarray, gt_boxes, connectivity: int, all_components: bool):
    """For each distinct score value v (ascending), the best IoU achievable
    by the candidate boxes of the mask {s >= v}.

    The mask, hence the IoU, is constant for tau in (v_prev, v], so these
    levels fully describe the curve.
    """
    levels = np.unique(score_map)
    best = np.zeros(levels.size, dtype=np.float64)
    for k, v in enumerate(levels):
        comps = connected_components(threshold(score_map, float(v)), connectivity)
        boxes = component_boxes(comps)
        if not boxes:
            continue
        if not all_components:
            boxes = boxes[:1]
        best[k] = max(iou(box, gt) for box, _ in boxes for gt in gt_boxes)
    return levels, best


def _curve(records, grid, deltas, connectivity, all_components, threads=1):
    if not records:
        raise ValueError("box accuracy is undefined for an empty record set")
    deltas = tuple(deltas)
    taus = grid.as_array()
    acc = np.zeros((len(deltas), taus.size), dtype=np.float64)

    def per_record(rec: BoxEvalRecord) -> np.ndarray:
        levels, best = _best_iou_per_level(rec.score_map, rec.gt_boxes, connectivity, all_components)
        # tau in (levels[k-1], levels[k]] yields the mask of levels[k];
        # tau above the max score yields an empty mask (best IoU 0)
        idx = np.searchsorted(levels, taus, side="left")
        iou_at_tau = np.where(idx < levels.size, best[np.minimum(idx, levels.size - 1)], 0.0)
        return (iou_at_tau[None, :] >= np.asarray(deltas)[:, None]).astype(np.float64)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            contributions = list(pool.map(per_record, records))
    else:
        contributions = [per_record(rec) for rec in records]
    for c in contributions:  # fixed order: deterministic for any thread count
        acc += c
    acc /= len(records)
    return BoxAccCurve(deltas=deltas, thresholds=grid, acc=acc, n_images=len(records))


def box_acc(records, grid: ThresholdGrid, deltas=(DEFAULT_DELTA,),
            connectivity: int = DEFAULT_CONNECTIVITY, threads: int = 1) -> BoxAccCurve:
    """Largest-component box accuracy curve over the threshold grid."""
    return _curve(records, grid, deltas, connectivity, all_components=False, threads=threads)


def box_acc_v2(records, grid: ThresholdGrid, deltas=V2_DELTAS,
               connectivity: int = DEFAULT_CONNECTIVITY, threads: int = 1) -> BoxAccCurve:
    """All-component box accuracy curve (best box/GT pair per image)."""
    return _curve(records, grid, deltas, connectivity, all_components=True, threads=threads)


@dataclass(frozen=True)
class MetricMax:
    value: float
    tau_star: float  # smallest tau attaining the max


def max_box_acc(curve: BoxAccCurve, delta: float = DEFAULT_DELTA) -> MetricMax:
    row = curve.row(delta)
    i = int(np.argmax(row))  # argmax returns the first maximizer
    return MetricMax(value=float(row[i]), tau_star=float(curve.thresholds.thresholds[i]))


@dataclass(frozen=True)
class V2Result:
    value: float
    per_delta: dict[float, MetricMax] = field(default_factory=dict)


def max_box_acc_v2(curve: BoxAccCurve, deltas=V2_DELTAS, shared_tau: bool = False) -> V2Result:
    """Mean over delta of the per-delta maxima (independent tau* per delta).

    shared_tau=True instead maximizes the delta-averaged curve over a single
    tau, for sensitivity studies.
    """
    for d in deltas:
        curve.row(d)  # raises if missing
    if shared_tau:
        mean_row = np.mean([curve.row(d) for d in deltas], axis=0)
        i = int(np.argmax(mean_row))
        tau = float(curve.thresholds.thresholds[i])
        per = {d: MetricMax(value=float(curve.row(d)[i]), tau_star=tau) for d in deltas}
        return V2Result(value=float(mean_row[i]), per_delta=per)
    per = {d: max_box_acc(curve, d) for d in deltas}
    return V2Result(value=float(np.mean([m.value for m in per.values()])), per_delta=per)


def curve_to_csv(curve: BoxAccCurve) -> str:
    """CSV export: header delta,tau,acc; ascending (delta, tau); 6 decimals."""
    lines = ["delta,tau,acc"]
    for d in sorted(curve.deltas):
        row = curve.row(d)
        for tau, a in zip(curve.thresholds.thresholds, row):
            lines.append(f"{d:.6f},{tau:.6f},{a:.6f}")
    return "\n".join(lines) + "\n"
