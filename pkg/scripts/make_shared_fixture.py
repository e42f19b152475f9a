#!/usr/bin/env python3
"""Regenerate the shared conformance fixture in tests/fixtures/shared/.

Writes a 3-image box manifest and a 3-image mask manifest with score maps,
plus shared_fixture.json carrying the same data inline together with the
expected engine outputs, so HTTP clients can check conformance against the
CLI without touching the on-disk formats.
"""
import json
from pathlib import Path

import numpy as np

from wsoleval.dataio import load_manifest, write_mask, write_scoremap
from wsoleval.evaluate import EvalConfig, evaluate

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures" / "shared"


def blob(shape, box, value=1.0):
    s = np.zeros(shape)
    x0, y0, x1, y1 = box
    s[y0:y1, x0:x1] = value
    return s


def grid_payload(arr):
    return {"height": arr.shape[0], "width": arr.shape[1],
            "values": [float(v) for v in np.asarray(arr, dtype=float).ravel()]}


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    box_maps = [
        blob((16, 16), (2, 3, 10, 12)),                      # perfect
        blob((16, 16), (0, 0, 10, 2)),                       # IoU 0.4 vs GT
        blob((16, 16), (1, 1, 4, 4)) + blob((16, 16), (8, 8, 15, 15), 0.9),
    ]
    box_gts = [[(2, 3, 10, 12)], [(0, 0, 10, 5)], [(1, 1, 4, 4)]]
    lines = [json.dumps({"split": "test"})]
    for i, (s, gts) in enumerate(zip(box_maps, box_gts)):
        iid = f"box{i}"
        write_scoremap(OUT / f"{iid}.wsm", s)
        lines.append(json.dumps({"image_id": iid, "width": 16, "height": 16,
                                 "boxes": [list(g) for g in gts]}))
    (OUT / "boxes.manifest").write_text("\n".join(lines) + "\n")

    rng = np.random.default_rng(2024)
    mask_maps, mask_gts, mask_ignores = [], [], []
    lines = [json.dumps({"split": "test"})]
    for i in range(3):
        iid = f"mask{i}"
        s = rng.integers(0, 256, size=(8, 8)) / 255.0
        gt = (rng.uniform(size=(8, 8)) < 0.35).astype(np.uint8)
        if not gt.any():
            gt[0, 0] = 1
        write_scoremap(OUT / f"{iid}.wsm", s)
        write_mask(OUT / f"{iid}_gt.png", gt)
        entry = {"image_id": iid, "width": 8, "height": 8, "mask": f"{iid}_gt.png"}
        ign = None
        if i == 2:
            ign = ((rng.uniform(size=(8, 8)) < 0.25) & (gt == 0)).astype(np.uint8)
            write_mask(OUT / f"{iid}_ign.png", ign)
            entry["ignore"] = f"{iid}_ign.png"
        lines.append(json.dumps(entry))
        mask_maps.append(s)
        mask_gts.append(gt)
        mask_ignores.append(ign)
    (OUT / "masks.manifest").write_text("\n".join(lines) + "\n")

    # expected values from the same engine path the CLI uses
    config = EvalConfig()
    box_report, _ = evaluate(load_manifest(OUT / "boxes.manifest"), OUT, "maxboxaccv2", config)
    mask_report, _ = evaluate(load_manifest(OUT / "masks.manifest"), OUT, "pxap", config)

    # score maps travel raw over HTTP with minmax normalization server-side,
    # matching the CLI defaults; float32 storage keeps both routes identical
    fixture = {
        "boxes": {
            "score_maps": [grid_payload(np.asarray(s, dtype=np.float32)) for s in box_maps],
            "gt_boxes": [[list(g) for g in gts] for gts in box_gts],
            "deltas": [0.3, 0.5, 0.7],
            "expected": {
                "value": box_report.value,
                "per_delta": {f"{d:g}": v[0] for d, v in box_report.per_delta.items()},
            },
        },
        "masks": {
            "score_maps": [grid_payload(np.asarray(s, dtype=np.float32)) for s in mask_maps],
            "gt_masks": [grid_payload(g) for g in mask_gts],
            "ignore_masks": [grid_payload(g) if g is not None else None for g in mask_ignores],
            "expected": {"pxap": mask_report.value},
        },
    }
    (OUT / "shared_fixture.json").write_text(json.dumps(fixture, indent=1) + "\n")
    print(f"wrote fixture to {OUT}")
    print(f"maxboxaccv2 {box_report.value!r}  pxap {mask_report.value!r}")


if __name__ == "__main__":
    main()
