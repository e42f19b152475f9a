import pytest
from hypothesis import given, strategies as st

from wsoleval import BoundingBox, iou

from oracles import iou_by_enumeration


def test_identical_boxes():
    a = BoundingBox(0, 0, 10, 10)
    assert iou(a, a) == 1.0


def test_disjoint_boxes():
    assert iou(BoundingBox(0, 0, 10, 10), BoundingBox(20, 20, 30, 30)) == 0.0


def test_half_overlap_matches_enumeration():
    a, b = (0, 0, 10, 10), (5, 0, 15, 10)
    got = iou(BoundingBox(*a), BoundingBox(*b))
    assert got == pytest.approx(iou_by_enumeration(a, b), abs=1e-12)
    assert got == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("coords", [(0, 0, 0, 5), (0, 0, 5, 0), (3, 1, 2, 4), (-1, 0, 2, 2)])
def test_degenerate_boxes_rejected(coords):
    with pytest.raises(ValueError):
        BoundingBox(*coords)


boxes = st.builds(
    lambda x0, y0, dw, dh: BoundingBox(x0, y0, x0 + dw, y0 + dh),
    st.integers(0, 20), st.integers(0, 20), st.integers(1, 20), st.integers(1, 20),
)


@given(boxes, boxes)
def test_iou_symmetric_and_bounded(a, b):
    assert iou(a, b) == iou(b, a)
    assert 0.0 <= iou(a, b) <= 1.0


@given(boxes, boxes)
def test_iou_one_iff_equal(a, b):
    assert (iou(a, b) == 1.0) == (a == b)


@given(boxes, boxes)
def test_iou_matches_enumeration(a, b):
    assert iou(a, b) == pytest.approx(iou_by_enumeration(a.as_tuple(), b.as_tuple()), abs=1e-12)
