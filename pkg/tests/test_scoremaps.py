import numpy as np
import pytest

from wsoleval import (
    ThresholdGrid,
    component_boxes,
    connected_components,
    normalize_max,
    normalize_minmax,
    resize_bilinear,
    threshold,
)

from oracles import flood_fill_components


class TestNormalize:
    def test_minmax_affine(self):
        np.testing.assert_array_equal(normalize_minmax([[0, 5], [10, 5]]), [[0, 0.5], [1, 0.5]])

    def test_minmax_constant_maps_to_zeros(self):
        np.testing.assert_array_equal(normalize_minmax([[3, 3], [3, 3]]), np.zeros((2, 2)))

    def test_minmax_negative_values(self):
        np.testing.assert_array_equal(normalize_minmax([[-1, 0], [1, 3]]), [[0, 0.25], [0.5, 1]])

    def test_minmax_idempotent(self):
        rng = np.random.default_rng(0)
        s = rng.normal(size=(7, 5))
        once = normalize_minmax(s)
        np.testing.assert_array_equal(normalize_minmax(once), once)

    def test_max_normalization(self):
        np.testing.assert_array_equal(normalize_max([[1, 2], [4, 2]]), [[0.25, 0.5], [1, 0.5]])
        np.testing.assert_array_equal(normalize_max([[0, 0], [0, 4]]), [[0, 0], [0, 1]])

    def test_max_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            normalize_max([[-2, -1], [-4, -3]])

    def test_minmax_preserves_order(self):
        rng = np.random.default_rng(1)
        s = rng.normal(size=(6, 6))
        out = normalize_minmax(s)
        assert np.array_equal(np.argsort(s.ravel()), np.argsort(out.ravel()))


class TestResize:
    def test_identity_size(self):
        s = np.array([[0.0, 1.0], [0.0, 1.0]])
        np.testing.assert_array_equal(resize_bilinear(s, 2, 2), s)

    def test_pixel_center_upsample(self):
        out = resize_bilinear(np.array([[0.0, 1.0]]), 1, 4)
        np.testing.assert_allclose(out, [[0.0, 0.25, 0.75, 1.0]], atol=1e-15)

    def test_constant_stays_constant(self):
        out = resize_bilinear(np.full((3, 4), 0.7), 9, 13)
        np.testing.assert_allclose(out, 0.7)

    def test_range_preserved(self):
        rng = np.random.default_rng(2)
        s = rng.uniform(size=(5, 7))
        out = resize_bilinear(s, 17, 11)
        assert out.min() >= s.min() - 1e-12 and out.max() <= s.max() + 1e-12


class TestThreshold:
    def test_basic(self):
        np.testing.assert_array_equal(threshold(np.array([[0.2, 0.8]]), 0.5), [[0, 1]])

    def test_boundary_inclusive(self):
        np.testing.assert_array_equal(threshold(np.array([[0.5]]), 0.5), [[1]])

    def test_tau_zero_all_ones(self):
        rng = np.random.default_rng(3)
        s = rng.uniform(size=(4, 4))
        assert threshold(s, 0.0).all()

    def test_antimonotone_in_tau(self):
        rng = np.random.default_rng(4)
        s = rng.uniform(size=(8, 8))
        taus = np.sort(rng.uniform(size=10))
        prev = threshold(s, taus[0])
        for t in taus[1:]:
            cur = threshold(s, t)
            assert np.all(cur <= prev)
            prev = cur


class TestThresholdGrid:
    def test_grid_spans_unit_interval(self):
        g = ThresholdGrid.from_spacing(0.001)
        assert len(g.thresholds) == 1001
        assert g.thresholds[0] == 0.0 and g.thresholds[-1] >= 1.0

    def test_exact_mode_distinct_sorted(self):
        g = ThresholdGrid.exact([np.array([[0.5, 0.1], [0.5, 0.9]])])
        assert g.thresholds == (0.1, 0.5, 0.9)

    def test_bad_spacing(self):
        with pytest.raises(ValueError):
            ThresholdGrid.from_spacing(0.0)


class TestConnectedComponents:
    def test_diagonal_4_vs_8(self):
        m = np.array([[1, 0], [0, 1]])
        assert connected_components(m, 4).count == 2
        assert connected_components(m, 8).count == 1

    @pytest.mark.parametrize("connectivity", [4, 8])
    def test_matches_flood_fill(self, connectivity):
        rng = np.random.default_rng(5)
        for _ in range(50):
            m = (rng.uniform(size=(16, 16)) < 0.4).astype(np.uint8)
            got = connected_components(m, connectivity)
            labels, count = flood_fill_components(m.tolist(), connectivity)
            assert got.count == count
            np.testing.assert_array_equal(got.labels, np.array(labels))

    def test_empty_mask(self):
        cs = connected_components(np.zeros((3, 3), dtype=np.uint8), 8)
        assert cs.count == 0
        assert component_boxes(cs) == []


class TestComponentBoxes:
    def test_full_frame(self):
        cs = connected_components(np.ones((4, 4), dtype=np.uint8), 4)
        (box, area), = component_boxes(cs)
        assert box.as_tuple() == (0, 0, 4, 4) and area == 16

    def test_two_components_sorted_by_area(self):
        cs = connected_components(np.array([[1, 1, 0], [0, 0, 0], [0, 0, 1]]), 4)
        got = [(b.as_tuple(), a) for b, a in component_boxes(cs)]
        assert got == [((0, 0, 2, 1), 2), ((2, 2, 3, 3), 1)]

    def test_tightness_and_partition(self):
        rng = np.random.default_rng(6)
        m = (rng.uniform(size=(12, 12)) < 0.35).astype(np.uint8)
        cs = connected_components(m, 8)
        covered = np.zeros_like(m)
        for box, area in component_boxes(cs):
            sub_labels = cs.labels[box.y0:box.y1, box.x0:box.x1]
            lbl = sub_labels[sub_labels > 0].min()
            comp = cs.labels == lbl
            assert comp.sum() == area
            # every component pixel inside its box
            ys, xs = np.nonzero(comp)
            assert ys.min() == box.y0 and ys.max() == box.y1 - 1
            assert xs.min() == box.x0 and xs.max() == box.x1 - 1
            covered |= comp
        np.testing.assert_array_equal(covered, m.astype(bool))
