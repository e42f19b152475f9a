import json

import numpy as np
import pytest

from wsoleval.dataio import write_mask, write_scoremap


def _blob_map(shape, box, value=1.0):
    s = np.zeros(shape, dtype=np.float64)
    x0, y0, x1, y1 = box
    s[y0:y1, x0:x1] = value
    return s


@pytest.fixture
def box_fixture(tmp_path):
    """3-image box manifest with score maps of known quality:
    img0 perfect, img1 blob with IoU 0.4 vs GT, img2 perfect."""
    maps = tmp_path / "maps"
    maps.mkdir()
    entries = [
        ("img0", (0, 0, 10, 10), (0, 0, 10, 10)),   # perfect
        ("img1", (0, 0, 10, 2), (0, 0, 10, 5)),     # IoU 0.4
        ("img2", (3, 3, 12, 12), (3, 3, 12, 12)),   # perfect
    ]
    lines = [json.dumps({"split": "test"})]
    for iid, blob, gt in entries:
        write_scoremap(maps / f"{iid}.wsm", _blob_map((16, 16), blob))
        lines.append(json.dumps(
            {"image_id": iid, "width": 16, "height": 16, "boxes": [list(gt)]}))
    manifest = tmp_path / "boxes.manifest"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest, maps


@pytest.fixture
def mask_fixture(tmp_path):
    """3-image mask manifest, one image with an ignore region."""
    maps = tmp_path / "maps"
    maps.mkdir(exist_ok=True)
    rng = np.random.default_rng(123)
    lines = [json.dumps({"split": "test"})]
    for i in range(3):
        iid = f"m{i}"
        s = rng.uniform(size=(8, 8))
        gt = (rng.uniform(size=(8, 8)) < 0.35).astype(np.uint8)
        if not gt.any():
            gt[0, 0] = 1
        write_scoremap(maps / f"{iid}.wsm", s)
        write_mask(tmp_path / f"{iid}_gt.png", gt)
        entry = {"image_id": iid, "width": 8, "height": 8, "mask": f"{iid}_gt.png"}
        if i == 1:
            ign = ((rng.uniform(size=(8, 8)) < 0.2) & (gt == 0)).astype(np.uint8)
            write_mask(tmp_path / f"{iid}_ign.png", ign)
            entry["ignore"] = f"{iid}_ign.png"
        lines.append(json.dumps(entry))
    manifest = tmp_path / "masks.manifest"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest, maps
