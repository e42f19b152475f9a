import json

import numpy as np
import pytest

from wsoleval.dataio import (
    ManifestError,
    check_disjoint,
    load_manifest,
    load_mask,
    load_scoremap,
    resolve_scoremap,
    write_mask,
    write_scoremap,
)


class TestScoremapFormat:
    def test_raw_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        s = rng.uniform(size=(7, 5)).astype(np.float32)
        p = tmp_path / "a.wsm"
        write_scoremap(p, s)
        back = load_scoremap(p)
        np.testing.assert_array_equal(back, s.astype(np.float64))

    def test_8bit_image_scaled_by_255(self, tmp_path):
        from PIL import Image

        arr = np.zeros((2, 2), dtype=np.uint8)
        arr[0, 1] = 128
        p = tmp_path / "img.png"
        Image.fromarray(arr, mode="L").save(p)
        s = load_scoremap(p)
        assert s[0, 1] == pytest.approx(128 / 255)

    def test_dimension_mismatch_names_both_sizes(self, tmp_path):
        p = tmp_path / "a.wsm"
        write_scoremap(p, np.zeros((2, 3)))
        with pytest.raises(ValueError, match=r"\(2, 3\).*\(4, 4\)"):
            load_scoremap(p, 4, 4)

    def test_bad_version_rejected(self, tmp_path):
        p = tmp_path / "bad.wsm"
        raw = b"WSLM" + bytes([9, 0, 0, 0]) + (0).to_bytes(4, "little") * 2
        p.write_bytes(raw)
        with pytest.raises(ValueError, match="version"):
            load_scoremap(p)

    def test_resolution_order_prefers_wsm(self, tmp_path):
        from PIL import Image

        write_scoremap(tmp_path / "x.wsm", np.zeros((2, 2)))
        Image.fromarray(np.zeros((2, 2), dtype=np.uint8), mode="L").save(tmp_path / "x.png")
        assert resolve_scoremap(tmp_path, "x").suffix == ".wsm"
        with pytest.raises(FileNotFoundError):
            resolve_scoremap(tmp_path, "missing")


class TestMasks:
    def test_round_trip(self, tmp_path):
        m = np.array([[1, 0], [0, 1]], dtype=np.uint8)
        p = tmp_path / "m.png"
        write_mask(p, m)
        np.testing.assert_array_equal(load_mask(p), m)

    def test_non_binary_values_rejected(self, tmp_path):
        from PIL import Image

        arr = np.full((2, 2), 17, dtype=np.uint8)
        p = tmp_path / "bad.png"
        Image.fromarray(arr, mode="L").save(p)
        with pytest.raises(ValueError, match="0 or 255"):
            load_mask(p)


def _write_manifest(path, split, entries):
    lines = [json.dumps({"split": split})] + [json.dumps(e) for e in entries]
    path.write_text("\n".join(lines) + "\n")


class TestManifest:
    def test_box_manifest_loads(self, tmp_path):
        p = tmp_path / "m.manifest"
        _write_manifest(p, "test", [
            {"image_id": f"i{k}", "width": 10, "height": 8, "boxes": [[0, 0, 5, 5]]}
            for k in range(3)
        ])
        m = load_manifest(p)
        assert m.split == "test" and len(m.entries) == 3
        assert m.entries[0].width == 10 and m.entries[0].height == 8

    def test_duplicate_id_names_the_id(self, tmp_path):
        p = tmp_path / "m.manifest"
        _write_manifest(p, "test", [
            {"image_id": "dup", "width": 4, "height": 4, "boxes": [[0, 0, 2, 2]]},
            {"image_id": "dup", "width": 4, "height": 4, "boxes": [[0, 0, 2, 2]]},
        ])
        with pytest.raises(ManifestError, match="dup"):
            load_manifest(p)

    def test_missing_mask_file_fails_eagerly(self, tmp_path):
        p = tmp_path / "m.manifest"
        _write_manifest(p, "test", [
            {"image_id": "a", "width": 4, "height": 4, "mask": "nope.png"},
        ])
        with pytest.raises((ManifestError, FileNotFoundError)):
            load_manifest(p)

    def test_malformed_box_names_line(self, tmp_path):
        p = tmp_path / "m.manifest"
        _write_manifest(p, "test", [
            {"image_id": "a", "width": 4, "height": 4, "boxes": [[0, 0, 0, 2]]},
        ])
        with pytest.raises(ManifestError, match=":2:"):
            load_manifest(p)

    def test_box_outside_frame_rejected(self, tmp_path):
        p = tmp_path / "m.manifest"
        _write_manifest(p, "test", [
            {"image_id": "a", "width": 4, "height": 4, "boxes": [[0, 0, 6, 2]]},
        ])
        with pytest.raises(ManifestError, match="exceeds"):
            load_manifest(p)

    def test_bad_split_rejected(self, tmp_path):
        p = tmp_path / "m.manifest"
        _write_manifest(p, "validation", [])
        with pytest.raises(ManifestError, match="split"):
            load_manifest(p)

    def test_mask_manifest_eager_dimension_check(self, tmp_path):
        write_mask(tmp_path / "m.png", np.zeros((3, 3), dtype=np.uint8))
        p = tmp_path / "m.manifest"
        _write_manifest(p, "test", [
            {"image_id": "a", "width": 4, "height": 4, "mask": "m.png"},
        ])
        with pytest.raises(ManifestError, match="manifest says"):
            load_manifest(p)


class TestDisjoint:
    def _manifest(self, tmp_path, name, split, ids):
        p = tmp_path / name
        _write_manifest(p, split, [
            {"image_id": i, "width": 4, "height": 4, "boxes": [[0, 0, 2, 2]]} for i in ids
        ])
        return load_manifest(p)

    def test_disjoint_ok(self, tmp_path):
        a = self._manifest(tmp_path, "a", "train-weaksup", ["x", "y"])
        b = self._manifest(tmp_path, "b", "test", ["z"])
        assert check_disjoint([a, b]) == {}

    def test_shared_id_reported(self, tmp_path):
        a = self._manifest(tmp_path, "a", "train-fullsup", ["x", "y"])
        b = self._manifest(tmp_path, "b", "test", ["y"])
        report = check_disjoint([a, b])
        assert report == {"y": ["train-fullsup", "test"]}
