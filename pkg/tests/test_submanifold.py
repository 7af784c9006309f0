import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from engelgeom.catalog import BUILTIN_IDS, EXPECTED_DEGREES, MAX_DEGREE_POINTS, builtin
from engelgeom.errors import (DegenerateTangentError, DegreeRangeError, DomainError,
                              ShapeError)
from engelgeom.submanifold import (ParamBox, ParamCurve, ParamSubmanifold, ParamSurface,
                                   deg3_pde_residual, fd_jacobian_error, global_degree,
                                   intrinsic_measure, pointwise_degree, riemannian_jacobian)


@pytest.mark.parametrize("name", BUILTIN_IDS)
def test_builtin_global_degrees(name):
    sub = builtin(name)
    rep = global_degree(sub)
    assert rep.global_degree == EXPECTED_DEGREES[name]
    assert pointwise_degree(sub, MAX_DEGREE_POINTS[name]) == EXPECTED_DEGREES[name]


@pytest.mark.parametrize("name, text", [
    ("plane", "degree 4; degree-2 locus {u1=0}"),
    ("x1x3-plane", "degree 4; degree-3 locus {u1=0}"),
    ("deg3-surface", "degree 3; degree-2 locus {u2=0}"),
    ("x4-line", "degree 3 everywhere"),
    ("parabola-14", "degree 3; degree-1 locus {t=0}"),
])
def test_stratification_summary(name, text):
    assert global_degree(builtin(name)).summary() == text


def test_types_by_dimension():
    assert isinstance(builtin("plane"), ParamSurface)
    assert isinstance(builtin("x1-line"), ParamCurve)


def test_plane_frame_tangent():
    assert np.allclose(builtin("plane").frame_tangent([1.0, 0.0]), [1, -1, 0, 0.5, 0, 0])


def test_low_degree_box(plane):
    box = global_degree(plane, 64).low_degree_box(2)
    assert box.lo[0] == box.hi[0] == 0.0
    assert (box.lo[1], box.hi[1]) == (-1.0, 1.0)


def test_degree_two_surface_is_impossible(plane):
    with pytest.raises(DegreeRangeError):
        global_degree(plane.restrict([(0.0, 0.0), (-1.0, 1.0)]))


def test_non_immersion():
    terms = [[((1, 0), 1.0)], [((1, 0), 1.0)], [], []]
    with pytest.raises(DegenerateTangentError):
        ParamSubmanifold.from_terms(terms, [(-1, 1), (-1, 1)])


def test_resolution_too_small(plane):
    with pytest.raises(DomainError):
        global_degree(plane, 1)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(-1, 1), st.floats(-1, 1))
def test_degree_left_invariant(a1, a2, a3, a4, u1, u2):
    sub = builtin("plane")
    moved = sub.left_translate([a1, a2, a3, a4])
    assert pointwise_degree(moved, (u1, u2)).value == pointwise_degree(sub, (u1, u2)).value


@given(st.floats(0.1, 5.0), st.floats(-1, 1), st.floats(-1, 1))
def test_degree_dilation_invariant(r, u1, u2):
    sub = builtin("deg3-surface")
    assert pointwise_degree(sub.dilated(r), (u1, u2)).value == \
        pointwise_degree(sub, (u1, u2)).value


def test_callable_matches_polynomial(plane):
    def phi(u):
        u = np.asarray(u, dtype=float)
        z = np.zeros(u.shape[:-1] + (4,))
        z[..., 0] = u[..., 0]
        z[..., 1] = u[..., 1]
        return z

    sub = ParamSubmanifold(map=phi, domain=[(-1, 1), (-1, 1)])
    u = np.random.default_rng(0).uniform(-1, 1, size=(50, 2))
    assert np.allclose(sub.frame_tangent(u), plane.frame_tangent(u), atol=1e-8)
    assert np.allclose(sub.left_translate([1, 2, 3, 4]).map(u),
                       plane.left_translate([1, 2, 3, 4]).map(u))
    assert fd_jacobian_error(plane) < 1e-8


def test_pde_residual():
    deg3 = builtin("deg3-surface")
    assert np.max(np.abs(deg3_pde_residual(deg3, deg3.domain.grid(256)))) == 0.0
    assert np.max(np.abs(deg3_pde_residual(builtin("plane"), [1.0, 0.0]))) > 0.1
    with pytest.raises(ShapeError):
        deg3_pde_residual(builtin("x1x3-plane"), [0.0, 0.0])


def test_intrinsic_measures():
    assert intrinsic_measure(builtin("plane"), 4) == pytest.approx(2 / 3, abs=1e-6)
    assert intrinsic_measure(builtin("deg3-surface", [(0, 1), (0, 1)]), 3) == \
        pytest.approx(0.5, abs=1e-6)
    assert intrinsic_measure(builtin("x4-line", [(0, 1)]), 3) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        intrinsic_measure(builtin("plane"), 1)


def test_riemannian_jacobian_plane(plane):
    u = np.array([[0.5, 0.2], [-1.0, 0.7]])
    assert np.allclose(riemannian_jacobian(plane, u), 1 + u[:, 0] ** 2 / 2)


def test_param_box():
    box = ParamBox.from_intervals([(0, 1), (2, 2)])
    assert box.volume == 0.0 and box.dim == 2
    assert [len(a) for a in box.axes(4)] == [5, 1]
    assert box.contains([0.5, 2.0]) and not box.contains([0.5, 2.5])
    with pytest.raises(DomainError):
        ParamBox((1.0,), (0.0,))
    with pytest.raises(DomainError):
        builtin("plane").restrict([(0, 3), (0, 1)])
