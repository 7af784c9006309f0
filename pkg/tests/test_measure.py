import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from engelgeom.catalog import builtin
from engelgeom.errors import DomainError, ToleranceNotMetError
from engelgeom.group import GaugeKind, HomGauge
from engelgeom.measure import (ball_intersection_measure, blowup_sequence, loglog_slope,
                               lower_bound_exponent)
from engelgeom.submanifold import ParamSubmanifold

ORIGIN = np.zeros(4)


def test_plane_closed_form(plane):
    r = 0.1
    m = ball_intersection_measure(plane, ORIGIN, r, gauge=HomGauge(GaugeKind.BOX), rtol=1e-8)
    exact = 4 * r ** 2 + 2 * r ** 4 / 3
    assert m.bracket[0] <= exact <= m.bracket[1]
    assert m.value == pytest.approx(exact, rel=1e-8)
    assert m.rigorous


@pytest.mark.parametrize("r", [0.5, 0.2, 0.05])
def test_vertical_line(r):
    m = ball_intersection_measure(builtin("x4-line"), ORIGIN, r)
    assert m.value == pytest.approx(2 * r ** 3, rel=1e-4)


@settings(max_examples=15)
@given(st.floats(1e-3, 0.9), st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_bracket_valid_at_every_level(r, u1, u2):
    sub = builtin("deg3-surface")
    m = ball_intersection_measure(sub, sub.map((u1, u2)), r, check_point=False)
    for lo, val, hi in m.levels:
        assert lo <= val <= hi
    assert m.levels[-1] == (m.bracket[0], m.value, m.bracket[1])
    inner = np.array([lv[0] for lv in m.levels])
    outer = np.array([lv[2] for lv in m.levels])
    assert np.all(np.diff(inner) >= 0)
    # outer sums shrink up to the Gauss rule error on the discarded cells
    assert np.all(np.diff(outer) <= 1e-6 * outer[:-1])


def test_monotone_in_r_and_vanishes():
    sub = builtin("parabola-14")
    x = sub.map((0.3,))
    vals = [ball_intersection_measure(sub, x, r).value for r in (0.5, 0.2, 0.1, 0.01, 1e-4)]
    assert np.all(np.diff(vals) <= 0)
    assert vals[-1] < 1e-10


def test_support_contains_trace(plane):
    x = plane.map((0.5, 0.1))
    m = ball_intersection_measure(plane, x, 0.05)
    u = np.random.default_rng(1).uniform(-1, 1, size=(200000, 2))
    hit = HomGauge().dist(x, plane.map(u)) <= 0.05
    assert np.all(m.support.contains(u[hit]))


def test_errors(plane):
    with pytest.raises(DomainError):
        ball_intersection_measure(plane, ORIGIN, 0.0)
    with pytest.raises(DomainError):
        ball_intersection_measure(plane, [0, 0, 1, 0], 0.1)
    with pytest.raises(ToleranceNotMetError) as err:
        sub = builtin("deg3-surface")
        ball_intersection_measure(sub, sub.map((0.3, 0.2)), 0.1, rtol=1e-9, max_cells=64)
    lo, hi = err.value.bracket
    assert lo <= err.value.estimate <= hi


def test_callable_parametrization_is_flagged():
    sub = ParamSubmanifold(map=lambda u: np.stack(
        [u[..., 0], np.zeros_like(u[..., 0]), np.zeros_like(u[..., 0]), u[..., 0] ** 2], -1),
        jacobian=lambda u: np.stack([np.ones_like(u), 0 * u, 0 * u, 2 * u], -2),
        domain=[(-1, 1)])
    m = ball_intersection_measure(sub, ORIGIN, 0.1)
    ref = ball_intersection_measure(builtin("parabola-14"), ORIGIN, 0.1)
    assert not m.rigorous
    assert m.value == pytest.approx(ref.value, rel=1e-3)


@pytest.mark.parametrize("name, u0, slope", [
    ("plane", (0.0, 0.0), 2.0), ("x1x3-plane", (0.0, 0.0), 3.0),
    ("deg3-surface", (0.0, 0.0), 2.0), ("parabola-14", (0.0,), 1.5),
    ("parabola-34", (0.0,), 2.0)])
def test_blowup_slopes(name, u0, slope):
    rep = blowup_sequence(builtin(name), u0)
    assert rep.slope == pytest.approx(slope, abs=0.1)
    assert rep.low_degree and rep.passed, rep.checks
    assert np.all(np.diff(rep.ratios) > 0)


def test_blowup_maximal_degree_notice():
    rep = blowup_sequence(builtin("deg3-surface"), (0.0, 0.5))
    assert not rep.low_degree and "maximal degree" in rep.notice
    assert rep.checks["bounded"]


@pytest.mark.parametrize("name, u0", [("plane", (0.0, 0.0)), ("parabola-14", (0.0,))])
def test_gauge_robustness(name, u0):
    a = blowup_sequence(builtin(name), u0)
    b = blowup_sequence(builtin(name), u0, gauge=HomGauge(scale=2.0))
    assert abs(a.slope - b.slope) < 0.05


def test_blowup_needs_decreasing_radii(plane):
    with pytest.raises(DomainError):
        blowup_sequence(plane, (0, 0), [0.1, 0.2, 0.05, 0.01])
    with pytest.raises(DomainError):
        blowup_sequence(plane, (0, 0), [0.1, 0.05, 0.01])


def test_lower_bound_table():
    assert lower_bound_exponent(2, 4, 2) == 3.0
    assert lower_bound_exponent(2, 5, 3) == 3.5
    assert lower_bound_exponent(2, 3, 2) == 2.0
    assert lower_bound_exponent(1, 3, 1) == 1.5
    assert lower_bound_exponent(1, 3, 2) == 2.0
    assert lower_bound_exponent(2, 5, 4) is None


def test_loglog_slope():
    x = np.array([1.0, 2.0, 4.0])
    assert loglog_slope(x, 3 * x ** 2.5) == pytest.approx(2.5)
    with pytest.raises(DomainError):
        loglog_slope(x, [1.0, 0.0, 2.0])
