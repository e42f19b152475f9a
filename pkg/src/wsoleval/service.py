"""HTTP service exposing evaluate-level entry points.

Score maps and masks travel as flat row-major value lists with explicit
height/width, so clients in any language can call in without touching the
on-disk formats. Numeric results match the CLI on identical inputs.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, boxmetrics, maskmetrics
from .boxmetrics import BoxEvalRecord
from .geometry import BoundingBox
from .hparams import kendall_tau, sample_trials, space_for
from .lemma import check_lemma_exhaustive
from .maskmetrics import MaskEvalRecord
from .scoremaps import ThresholdGrid, normalize_max, normalize_minmax

app = FastAPI(title="wsoleval", version=__version__)


class GridPayload(BaseModel):
    height: int = Field(ge=1)
    width: int = Field(ge=1)
    values: list[float]

    def to_array(self):
        import numpy as np

        if len(self.values) != self.height * self.width:
            raise HTTPException(422, detail=(
                f"grid needs {self.height * self.width} values, got {len(self.values)}"
            ))
        return np.asarray(self.values, dtype=float).reshape(self.height, self.width)


def _calibrate(arr, normalization: str):
    try:
        if normalization == "minmax":
            return normalize_minmax(arr)
        if normalization == "max":
            return normalize_max(arr)
        if normalization == "none":
            if arr.min() < 0.0 or arr.max() > 1.0:
                raise ValueError("normalization 'none' requires scores already in [0, 1]")
            return arr
        raise ValueError(f"unknown normalization {normalization!r}")
    except ValueError as e:
        raise HTTPException(422, detail=str(e)) from e


def _grid(exact: bool, spacing: float, score_maps) -> ThresholdGrid:
    if exact:
        return ThresholdGrid.exact(score_maps)
    try:
        return ThresholdGrid.from_spacing(spacing)
    except ValueError as e:
        raise HTTPException(422, detail=str(e)) from e


class EvaluateBoxesRequest(BaseModel):
    score_maps: list[GridPayload]
    gt_boxes: list[list[tuple[int, int, int, int]]]
    deltas: list[float] = [0.3, 0.5, 0.7]
    grid_spacing: float = 0.001
    exact_thresholds: bool = False
    connectivity: int = 8
    normalization: str = "minmax"
    all_components: bool = True  # False reproduces the largest-component metric


class DeltaMax(BaseModel):
    delta: float
    value: float
    tau_star: float


class EvaluateBoxesResponse(BaseModel):
    value: float
    per_delta: list[DeltaMax]
    n_images: int


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/evaluate/boxes", response_model=EvaluateBoxesResponse)
def evaluate_boxes(req: EvaluateBoxesRequest):
    if not req.score_maps or len(req.score_maps) != len(req.gt_boxes):
        raise HTTPException(422, detail="need one non-empty gt box list per score map")
    try:
        records = [
            BoxEvalRecord(
                image_id=str(i),
                score_map=_calibrate(sm.to_array(), req.normalization),
                gt_boxes=tuple(BoundingBox(*b) for b in boxes),
            )
            for i, (sm, boxes) in enumerate(zip(req.score_maps, req.gt_boxes))
        ]
        grid = _grid(req.exact_thresholds, req.grid_spacing, [r.score_map for r in records])
        fn = boxmetrics.box_acc_v2 if req.all_components else boxmetrics.box_acc
        curve = fn(records, grid, deltas=tuple(req.deltas), connectivity=req.connectivity)
        per = [boxmetrics.max_box_acc(curve, d) for d in req.deltas]
    except (ValueError, TypeError) as e:
        raise HTTPException(422, detail=str(e)) from e
    value = sum(m.value for m in per) / len(per)
    return EvaluateBoxesResponse(
        value=value,
        per_delta=[DeltaMax(delta=d, value=m.value, tau_star=m.tau_star)
                   for d, m in zip(req.deltas, per)],
        n_images=len(records),
    )


class EvaluateMasksRequest(BaseModel):
    score_maps: list[GridPayload]
    gt_masks: list[GridPayload]
    ignore_masks: list[GridPayload | None] | None = None
    grid_spacing: float = 0.001
    exact_thresholds: bool = False
    normalization: str = "minmax"


class EvaluateMasksResponse(BaseModel):
    pxap: float
    thresholds: list[float]
    precision: list[float]
    recall: list[float]
    n_images: int


@app.post("/evaluate/masks", response_model=EvaluateMasksResponse)
def evaluate_masks(req: EvaluateMasksRequest):
    if not req.score_maps or len(req.score_maps) != len(req.gt_masks):
        raise HTTPException(422, detail="need one gt mask per score map")
    ignores = req.ignore_masks or [None] * len(req.score_maps)
    if len(ignores) != len(req.score_maps):
        raise HTTPException(422, detail="ignore mask list length mismatch")
    try:
        records = [
            MaskEvalRecord(
                image_id=str(i),
                score_map=_calibrate(sm.to_array(), req.normalization),
                gt_mask=gm.to_array(),
                ignore_mask=ig.to_array() if ig is not None else None,
            )
            for i, (sm, gm, ig) in enumerate(zip(req.score_maps, req.gt_masks, ignores))
        ]
        grid = (maskmetrics.exact_grid(records) if req.exact_thresholds
                else _grid(False, req.grid_spacing, None))
        curve = maskmetrics.px_pr_curve(records, grid)
    except (ValueError, TypeError) as e:
        raise HTTPException(422, detail=str(e)) from e
    return EvaluateMasksResponse(
        pxap=curve.ap,
        thresholds=list(curve.thresholds.thresholds),
        precision=[float(v) for v in curve.precision],
        recall=[float(v) for v in curve.recall],
        n_images=len(records),
    )


class SampleHparamsRequest(BaseModel):
    method: str
    n: int = 30
    seed: int = 0


@app.post("/hparams/sample")
def sample_hparams(req: SampleHparamsRequest):
    try:
        trials = sample_trials(space_for(req.method), req.n, req.seed)
    except ValueError as e:
        raise HTTPException(422, detail=str(e)) from e
    return {"trials": [
        {"trial_id": t.trial_id, "method": t.method, "values": t.values, "seed": t.seed}
        for t in trials
    ]}


class KendallTauRequest(BaseModel):
    ranking_a: list[float]
    ranking_b: list[float]


@app.post("/analysis/kendall-tau")
def kendall(req: KendallTauRequest):
    try:
        tau = kendall_tau(req.ranking_a, req.ranking_b)
    except ValueError as e:
        raise HTTPException(422, detail=str(e)) from e
    return {"kendall_tau": tau}


class LemmaRequest(BaseModel):
    max_cues: int = 4
    posterior_grid: int = 9
    strict: bool = True


@app.post("/lemma/check")
def lemma_check(req: LemmaRequest):
    report = check_lemma_exhaustive(max_cues=req.max_cues, posterior_grid=req.posterior_grid,
                                    strict=req.strict)
    return {"worlds_checked": report.worlds_checked,
            "disagreements": report.disagreements,
            "counterexamples": report.counterexamples}
