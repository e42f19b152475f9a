"""Threshold-independent evaluation engine for weakly-supervised object
localization: MaxBoxAcc, MaxBoxAccV2, PxAP, the surrounding search protocol,
baselines and the ill-posedness lemma checker."""

__version__ = "0.1.0"

from .geometry import BoundingBox, iou
from .scoremaps import (
    ComponentSet,
    ThresholdGrid,
    component_boxes,
    connected_components,
    normalize_max,
    normalize_minmax,
    resize_bilinear,
    threshold,
)
from .boxmetrics import (
    BoxAccCurve,
    BoxEvalRecord,
    box_acc,
    box_acc_v2,
    max_box_acc,
    max_box_acc_v2,
)
from .maskmetrics import MaskEvalRecord, PrCurve, apply_ignore, px_ap, px_pr_curve
from .baselines import GaussianSpec, boxes_to_mask, center_gaussian
from .hparams import (
    TrialConfig,
    TrialResult,
    filter_converged,
    kendall_tau,
    sample_trials,
    select_best,
    space_for,
)
from .lemma import (
    CueWorld,
    check_lemma_exhaustive,
    perfect_threshold_exists,
    posterior_ratio_condition,
    posterior_ratio_from_likelihoods,
    px_acc,
)

__all__ = [
    "BoundingBox", "iou",
    "ComponentSet", "ThresholdGrid", "component_boxes", "connected_components",
    "normalize_max", "normalize_minmax", "resize_bilinear", "threshold",
    "BoxAccCurve", "BoxEvalRecord", "box_acc", "box_acc_v2", "max_box_acc", "max_box_acc_v2",
    "MaskEvalRecord", "PrCurve", "apply_ignore", "px_ap", "px_pr_curve",
    "GaussianSpec", "boxes_to_mask", "center_gaussian",
    "TrialConfig", "TrialResult", "filter_converged", "kendall_tau",
    "sample_trials", "select_best", "space_for",
    "CueWorld", "check_lemma_exhaustive", "perfect_threshold_exists",
    "posterior_ratio_condition", "posterior_ratio_from_likelihoods", "px_acc",
]
