import numpy as np
import pytest

from engelgeom import group
from engelgeom.catalog import builtin
from engelgeom.errors import CertificationError, DomainError
from engelgeom.measure import ball_intersection_measure
from engelgeom.oracle import (UndersampledWarning, certify_group_law, certify_wedge_formula,
                              mc_measure)


def test_group_law_certifies():
    rep = certify_group_law()
    assert rep.passed
    assert max(v for k, v in rep.residuals.items() if rep.thresholds[k] == 1e-12) < 1e-12


def test_seed_change_same_verdict():
    assert certify_group_law(2000, seed=7).passed


def _wrong_sign(x, y):
    z = group.mul(x, y)
    z[..., 2] -= 2 * x[..., 0] * y[..., 1]
    return z


def test_wrong_sign_rejected():
    with pytest.raises(CertificationError) as err:
        certify_group_law(2000, mul=_wrong_sign)
    assert not err.value.report.passed


def test_wrong_weights_rejected():
    rep = certify_group_law(2000, weights=(1, 1, 2, 2), raise_on_failure=False)
    assert "dilation" in rep.failures


def test_wrong_frame_rejected():
    def frame(x):
        f = group.frame_at(x)
        f[..., 3, 1] *= 2.0
        return f

    assert "left_invariance" in certify_group_law(2000, frame=frame,
                                                  raise_on_failure=False).failures


def test_too_few_samples():
    with pytest.raises(DomainError):
        certify_group_law(10)


def test_wedge_formula_certifies():
    assert certify_wedge_formula().passed


def test_mc_plane_against_closed_form(plane):
    est = mc_measure(plane, np.zeros(4), 0.1, seed=0)
    assert est.agrees(4 * 0.01 + 2e-4 / 3)
    assert est.seed == 0 and est.samples == 1_000_000


def test_mc_full_area_for_huge_radius(plane):
    est = mc_measure(plane, np.zeros(4), 50.0, samples=200_000)
    assert est.hits == 200_000
    assert est.agrees(14 / 3)


def test_mc_undersampled():
    with pytest.warns(UndersampledWarning):
        est = mc_measure(builtin("parabola-34"), np.zeros(4), 1e-4, samples=10_000)
    assert est.estimate == 0.0


def test_mc_deterministic_and_validated(plane):
    a = mc_measure(plane, np.zeros(4), 0.3, samples=20_000, seed=5)
    b = mc_measure(plane, np.zeros(4), 0.3, samples=20_000, seed=5)
    assert a == b
    with pytest.raises(DomainError):
        mc_measure(plane, np.zeros(4), 0.3, samples=100)
    with pytest.raises(DomainError):
        mc_measure(plane, np.zeros(4), 0.3, box=[(-2, 2), (0, 1)])


@pytest.mark.parametrize("name, u0", [("x1x3-plane", (0.2, 0.1)), ("deg3-surface", (0.3, -0.2))])
def test_mc_agrees_with_quadrature(name, u0):
    sub = builtin(name)
    x = sub.map(u0)
    q = ball_intersection_measure(sub, x, 0.2)
    assert mc_measure(sub, x, 0.2, samples=200_000, box=q.support).agrees(q.value)
