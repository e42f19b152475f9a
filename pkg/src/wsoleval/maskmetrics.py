"""Pixel-wise precision/recall and average precision (PxAP).

Counts are pooled over all non-ignored pixels of the whole record set
(dataset-level precision/recall, not per-image averages). Ignored pixels
contribute to no numerator or denominator.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .scoremaps import ThresholdGrid, as_binary_mask, as_score_map


@dataclass(frozen=True)
class MaskEvalRecord:
    """One image: calibrated score map, ground-truth mask and an optional
    ignore mask (1 = pixel excluded from every count)."""

    image_id: str
    score_map: np.ndarray
    gt_mask: np.ndarray
    ignore_mask: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "score_map", as_score_map(self.score_map))
        object.__setattr__(self, "gt_mask", as_binary_mask(self.gt_mask))
        if self.gt_mask.shape != self.score_map.shape:
            raise ValueError(
                f"record {self.image_id!r}: mask shape {self.gt_mask.shape} "
                f"!= score map shape {self.score_map.shape}"
            )
        if self.ignore_mask is not None:
            ign = as_binary_mask(self.ignore_mask)
            if ign.shape != self.score_map.shape:
                raise ValueError(f"record {self.image_id!r}: ignore mask shape mismatch")
            if np.any((ign == 1) & (self.gt_mask == 1)):
                raise ValueError(f"record {self.image_id!r}: pixel both foreground and ignored")
            object.__setattr__(self, "ignore_mask", ign)


def apply_ignore(record: MaskEvalRecord) -> MaskEvalRecord:
    """Normalize the ignore mask (None becomes all zeros). Exclusion itself
    happens in the counting: ignored pixels never enter any count."""
    if record.ignore_mask is not None:
        return record
    return MaskEvalRecord(
        image_id=record.image_id,
        score_map=record.score_map,
        gt_mask=record.gt_mask,
        ignore_mask=np.zeros_like(record.gt_mask),
    )


def _valid_pixels(record: MaskEvalRecord) -> tuple[np.ndarray, np.ndarray]:
    """Flattened (scores, labels) over non-ignored pixels."""
    if record.ignore_mask is None:
        return record.score_map.ravel(), record.gt_mask.ravel()
    keep = record.ignore_mask.ravel() == 0
    return record.score_map.ravel()[keep], record.gt_mask.ravel()[keep]


@dataclass(frozen=True)
class PrCurve:
    thresholds: ThresholdGrid
    precision: np.ndarray  # aligned with thresholds (ascending tau)
    recall: np.ndarray
    ap: float


def exact_grid(records) -> ThresholdGrid:
    """Distinct pooled non-ignored score values of the record set."""
    return ThresholdGrid.exact([_valid_pixels(r)[0] for r in records])


def px_pr_curve(records, grid: ThresholdGrid, threads: int = 1) -> PrCurve:
    if not records:
        raise ValueError("PR curve is undefined for an empty record set")
    taus = grid.as_array()

    def per_record(rec: MaskEvalRecord) -> tuple[np.ndarray, np.ndarray, int]:
        scores, labels = _valid_pixels(rec)
        all_sorted = np.sort(scores)
        fg_sorted = np.sort(scores[labels == 1])
        pred = all_sorted.size - np.searchsorted(all_sorted, taus, side="left")
        tp = fg_sorted.size - np.searchsorted(fg_sorted, taus, side="left")
        return pred, tp, fg_sorted.size

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(per_record, records))
    else:
        parts = [per_record(rec) for rec in records]

    pred = np.zeros(taus.size, dtype=np.int64)
    tp = np.zeros(taus.size, dtype=np.int64)
    n_fg = 0
    for p, t, f in parts:  # integer sums: order- and thread-independent
        pred += p
        tp += t
        n_fg += f
    if n_fg == 0:
        raise ValueError("no foreground pixels in the record set; recall is undefined")

    precision = np.ones(taus.size, dtype=np.float64)  # empty prediction set -> precision 1
    nonzero = pred > 0
    precision[nonzero] = tp[nonzero] / pred[nonzero]
    recall = tp / n_fg
    ap = px_ap(precision, recall)
    return PrCurve(thresholds=grid, precision=precision, recall=recall, ap=ap)


def px_ap(precision, recall=None) -> float:
    """AP = sum of Prec(tau_l) * (Rec(tau_l) - Rec(tau_{l-1})) over descending
    tau (recall increments are then non-negative), with Rec before the first
    term taken as 0. Accepts a PrCurve or explicit precision/recall arrays."""
    if isinstance(precision, PrCurve):
        precision, recall = precision.precision, precision.recall
    prec_d = np.asarray(precision)[::-1]
    rec_d = np.asarray(recall)[::-1]
    prev = np.concatenate(([0.0], rec_d[:-1]))
    return float(np.sum(prec_d * (rec_d - prev)))


def pr_curve_to_csv(curve: PrCurve) -> str:
    """CSV export: header tau,precision,recall; descending tau; 6 decimals;
    final line '#pxap,<value>'."""
    lines = ["tau,precision,recall"]
    taus = curve.thresholds.thresholds
    for i in range(len(taus) - 1, -1, -1):
        lines.append(f"{taus[i]:.6f},{curve.precision[i]:.6f},{curve.recall[i]:.6f}")
    lines.append(f"#pxap,{curve.ap:.6f}")
    return "\n".join(lines) + "\n"
