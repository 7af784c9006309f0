import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from engelgeom.algebra import (DegreeValue, Frame2Vector, FrameVector, bivector_degree,
                               bivector_degrees, degree_d_component_norm, vector_component_norm,
                               vector_degree, wedge_closed_form, wedge_frame_product)
from engelgeom.errors import DegenerateTangentError, DomainError

vec = arrays(np.float64, 4, elements=st.floats(-3, 3, allow_nan=False))


@given(vec, vec, vec)
def test_two_wedge_paths_agree(x, v, w):
    assert np.allclose(wedge_closed_form(x, v, w), wedge_frame_product(x, v, w), atol=1e-9)


@given(vec, vec, vec)
def test_wedge_antisymmetric(x, v, w):
    assert np.allclose(wedge_closed_form(x, v, w), -wedge_closed_form(x, w, v))
    assert np.allclose(wedge_closed_form(x, v, v), 0.0)


def test_plane_tangent_at_u():
    x = np.array([1.5, 0.3, 0.0, 0.0])
    c = wedge_closed_form(x, [1, 0, 0, 0], [0, 1, 0, 0])
    assert np.allclose(c, [1.0, -1.5, 0.0, 1.5 ** 2 / 2, 0.0, 0.0])


@pytest.mark.parametrize("a, d", [([1, 0, 0, 0], 1), ([0, 1e-3, 0, 0], 1), ([1, 1, 2, 0], 2),
                                  ([0, 0, 0, 1], 3)])
def test_vector_degree(a, d):
    assert vector_degree(a) == d


@pytest.mark.parametrize("c, d", [([1, 0, 0, 0, 0, 0], 2), ([1, 0, 2, 0, 0, 0], 3),
                                  ([0, 0, 0, 0, 1, 0], 4), ([0, 0, 0, 0, 0, 1], 5)])
def test_bivector_degree(c, d):
    assert bivector_degree(c) == d


def test_degenerate_tangent():
    with pytest.raises(DegenerateTangentError):
        vector_degree([0, 0, 0, 0])
    with pytest.raises(DegenerateTangentError):
        bivector_degree(np.full(6, 1e-12))


def test_degree_value_margin():
    dv = bivector_degree([1, 0.5, 0, 3e-9, 0, 0])
    assert dv.value == 4 and dv.margin == pytest.approx(3e-9) and dv.borderline
    assert int(dv) == 4
    assert dv.suppressed == 0.0
    assert isinstance(dv, DegreeValue)
    with pytest.raises(DomainError):
        bivector_degree([1, 0, 0, 0, 0, 0], tol=0.0)


@given(arrays(np.float64, 6, elements=st.floats(-1, 1)), st.floats(1e-12, 1e-3),
       st.floats(1.0, 1e3))
def test_degree_nonincreasing_in_tolerance(c, tol, factor):
    d_small, _, _ = bivector_degrees(c, tol)
    d_big, _, _ = bivector_degrees(c, tol * factor)
    assert d_big <= d_small


def test_component_norms():
    c = np.array([1.0, 3.0, 4.0, 0.0, 0.0, 2.0])
    assert degree_d_component_norm(c, 3) == pytest.approx(5.0)
    assert degree_d_component_norm(c, 5) == pytest.approx(2.0)
    assert vector_component_norm([3.0, 4.0, 1.0, 0.0], 1) == pytest.approx(5.0)
    with pytest.raises(DomainError):
        degree_d_component_norm(c, 1)
    with pytest.raises(DomainError):
        vector_component_norm([1, 0, 0, 0], 4)


def test_dataclasses_round_trip():
    assert np.array_equal(np.asarray(FrameVector.from_array([1, 2, 3, 4])), [1, 2, 3, 4])
    c = Frame2Vector.from_array(np.arange(6.0))
    assert c.c34 == 5.0 and np.array_equal(c.as_array(), np.arange(6.0))


def test_reference_degree_values():
    assert vector_degree([0, 0, 1, 0]) == 2
    assert bivector_degree([0, 0, 0, 0, 0, 1]) == 5
