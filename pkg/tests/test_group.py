import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from engelgeom.errors import DomainError
from engelgeom.group import (DEFAULT_GAUGE, IDENTITY, GaugeKind, GroupPoint, HomGauge,
                             coord_to_frame, dilate, dist, frame_at, gauge, inv, mul,
                             push_dilation, quasi_triangle_constant, raw_gauge)

coords = arrays(np.float64, 4, elements=st.floats(-3, 3, allow_nan=False))
radii = st.floats(0.05, 5.0)
# dyadic coordinates keep the group law exact, which matters once the gauge
# takes cube roots of cancelled differences
dyadic = arrays(np.float64, 4, elements=st.integers(-24, 24).map(lambda k: k / 8.0))


def test_mul_formula_by_hand():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    y = np.array([0.5, -1.0, 2.0, 1.0])
    # (x1+y1, x2+y2, x3+y3+x1 y2, x4+y4+x1 y3+x1^2 y2/2)
    assert np.allclose(mul(x, y), [1.5, 1.0, 4.0, 6.5])


def test_inverse_example():
    assert np.allclose(inv([1.0, 1.0, 1.0, 0.5]), [-1.0, -1.0, 0.0, 0.0])


@given(coords, coords, coords)
def test_associative(x, y, z):
    assert np.allclose(mul(mul(x, y), z), mul(x, mul(y, z)), atol=1e-9)


@given(coords)
def test_identity_and_inverse(x):
    assert np.allclose(mul(x, IDENTITY), x)
    assert np.allclose(mul(IDENTITY, x), x)
    assert np.allclose(mul(x, inv(x)), 0.0, atol=1e-12)
    assert np.allclose(mul(inv(x), x), 0.0, atol=1e-12)


@given(coords, coords, radii)
def test_dilation_is_automorphism(x, y, r):
    assert np.allclose(dilate(r, mul(x, y)), mul(dilate(r, x), dilate(r, y)), atol=1e-9)


@given(dyadic, dyadic, dyadic)
def test_distance_left_invariant(a, x, y):
    assert math.isclose(dist(mul(a, x), mul(a, y)), dist(x, y), rel_tol=1e-6, abs_tol=1e-9)


@given(coords, coords)
def test_distance_symmetric(x, y):
    assert math.isclose(dist(x, y), dist(y, x), rel_tol=1e-9, abs_tol=1e-12)


@given(coords, radii)
def test_gauge_homogeneous(x, r):
    assert math.isclose(gauge(dilate(r, x)), r * gauge(x), rel_tol=1e-9, abs_tol=1e-12)


def test_gauge_zero_only_at_identity():
    assert gauge(IDENTITY) == 0.0
    assert gauge([0, 0, 0, 1e-9]) > 0


def test_raw_box_gauge_example():
    assert raw_gauge([0.1, -0.2, 0.09, -0.008]) == pytest.approx(0.3)


def test_dilate_rejects_nonpositive():
    with pytest.raises(DomainError):
        dilate(0.0, [1, 1, 1, 1])


def test_frame_at_origin_is_identity():
    assert np.array_equal(frame_at(IDENTITY), np.eye(4))


def test_frame_columns():
    f = frame_at([2.0, 0.0, 0.0, 0.0])
    # X2 = d2 + x1 d3 + x1^2/2 d4, X3 = d3 + x1 d4
    assert np.allclose(f[:, 1], [0, 1, 2, 2])
    assert np.allclose(f[:, 2], [0, 0, 1, 2])


@given(coords, coords)
def test_coord_to_frame_inverts_frame(x, v):
    a = coord_to_frame(x, v)
    assert np.allclose(frame_at(x) @ a, v, atol=1e-9)


@given(coords, radii)
def test_push_dilation(v, r):
    assert np.allclose(push_dilation(r, v), v * np.array([r, r, r * r, r ** 3]))


def test_box_constants():
    assert HomGauge(GaugeKind.BOX).box_constant == 1.0
    assert DEFAULT_GAUGE.box_constant == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)


def test_symbox_balls_sandwich_boxes(rng):
    lam = DEFAULT_GAUGE.box_constant
    pts = rng.uniform(-1, 1, size=(20000, 4))
    assert np.all(gauge(dilate(lam, pts)) <= 1.0 + 1e-12)


def test_quasi_triangle_constant_reasonable():
    c = quasi_triangle_constant(GaugeKind.SYMBOX, samples=20000)
    assert 1.0 <= c < 10.0


def test_scaled_gauge():
    g = HomGauge(scale=2.0)
    x = np.array([0.3, 0.0, 0.0, 0.0])
    assert g(x) == pytest.approx(0.6)
    with pytest.raises(DomainError):
        HomGauge(scale=0.0)


def test_group_point():
    p = GroupPoint(1.0, 1.0, 1.0, 0.5)
    assert np.allclose(p.inverse().as_array(), [-1, -1, 0, 0])
    assert np.allclose((p * p.inverse()).as_array(), 0.0)
    assert np.allclose(np.asarray(p.dilate(2.0)), [2, 2, 4, 4])
    assert GroupPoint.identity().as_array().tolist() == [0, 0, 0, 0]
    with pytest.raises(DomainError):
        GroupPoint(float("nan"), 0, 0, 0)


def test_reference_dilation_and_frame_values():
    assert np.array_equal(dilate(2.0, [1, 1, 1, 1]), [2, 2, 4, 8])
    assert np.allclose(frame_at([1.0, 0.0, 0.0, 0.0])[:, 1], [0, 1, 1, 0.5])
