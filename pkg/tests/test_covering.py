import numpy as np
import pytest

from engelgeom.catalog import builtin
from engelgeom.covering import (covering_count, dimension_estimate, greedy_cover,
                                hausdorff_vs_intrinsic, negligibility_decay, sample_spacing)
from engelgeom.errors import DomainError, PreconditionError, ResolutionError
from engelgeom.group import DEFAULT_GAUGE


@pytest.mark.parametrize("delta", [0.1, 0.05, 0.02, 0.01])
def test_unit_segment(delta):
    n = covering_count(builtin("x1-line", [(0, 1)]), delta)
    assert abs(n - 1 / (2 * delta)) <= 1


def test_large_delta_single_ball(plane):
    assert covering_count(plane, 10.0) == 1


def test_every_sample_is_covered():
    sub = builtin("parabola-14")
    cover = greedy_cover(sub, 0.1, oversample=4.0)
    pts = sub.map(np.linspace(-1, 1, cover.nodes[0])[:, None])
    covered = np.zeros(len(pts), dtype=bool)
    for c in sub.map(cover.centers):
        covered |= DEFAULT_GAUGE.dist(c, pts) <= 0.1
    assert covered.all()
    assert cover.new_per_ball.sum() == cover.samples


def test_plane_trace_matches_group_law():
    # direct trace computation: for x=(a,b,0,0), y=(u1,u2,0,0) and D=u2-b the
    # symmetrised gauge is max(|u1-a|, |D|, sqrt|aD|, sqrt|u1 D|, (a^2|D|/2)^(1/3), (u1^2|D|/2)^(1/3))
    rng = np.random.default_rng(3)
    a, b = rng.uniform(1, 2, 500), rng.uniform(0, 1, 500)
    u1, u2 = rng.uniform(1, 2, 500), rng.uniform(0, 1, 500)
    dd = np.abs(u2 - b)
    expected = np.max([np.abs(u1 - a), dd, np.sqrt(a * dd), np.sqrt(u1 * dd),
                       np.cbrt(a * a * dd / 2), np.cbrt(u1 * u1 * dd / 2)], axis=0)
    x = np.stack([a, b, 0 * a, 0 * a], -1)
    y = np.stack([u1, u2, 0 * a, 0 * a], -1)
    assert np.allclose(DEFAULT_GAUGE.dist(x, y), expected, rtol=1e-12)


def test_plane_patch_count_scales_like_delta_to_minus_four():
    patch = builtin("plane", [(1, 2), (0, 1)])
    n1 = covering_count(patch, 0.25, oversample=2.0)
    n2 = covering_count(patch, 0.125, oversample=2.0)
    assert 10 <= n2 / n1 <= 24


def test_spacing_is_anisotropic():
    nodes = sample_spacing(builtin("plane", [(1, 2), (0, 1)]), 0.125, oversample=2.0)
    assert nodes[1] > 50 * nodes[0]


def test_coarse_grid_is_rejected():
    with pytest.raises(ResolutionError):
        greedy_cover(builtin("x4-line"), 0.05, nodes=20)
    with pytest.raises(ResolutionError):
        greedy_cover(builtin("x4-line"), 0.01, max_samples=1000)
    with pytest.raises(DomainError):
        greedy_cover(builtin("x4-line"), 0.0)


def test_dimension_of_curves():
    assert dimension_estimate(builtin("x1-line", [(0, 1)]),
                              2.0 ** -np.arange(3, 8)).dimension == pytest.approx(1, abs=0.1)
    rep = dimension_estimate(builtin("x3-line"), 2.0 ** -np.arange(2, 6))
    assert rep.dimension == pytest.approx(2, abs=0.3) and rep.expected_degree == 2
    assert rep.monotone and np.all(rep.counts >= 1)
    with pytest.raises(DomainError):
        dimension_estimate(builtin("x3-line"), [0.1, 0.05, 0.02])


@pytest.mark.parametrize("name, stratum, d", [
    ("plane", [(0, 0), (-1, 1)], 4), ("deg3-surface", [(-1, 1), (0, 0)], 3),
    ("parabola-34", [(0, 0)], 3)])
def test_negligibility(name, stratum, d):
    rep = negligibility_decay(builtin(name), stratum, d, 2.0 ** -np.arange(2, 7))
    assert rep.passed and rep.decay_factor >= 4


def test_plane_line_decay_exponent(plane):
    rep = negligibility_decay(plane, [(0, 0), (-1, 1)], 4, 2.0 ** -np.arange(2, 7))
    assert rep.decay_exponent == pytest.approx(3, abs=0.5)


def test_negligibility_needs_decreasing_scales(plane):
    with pytest.raises(DomainError):
        negligibility_decay(plane, [(0, 0), (-1, 1)], 4, [0.1, 0.2])


def test_comparability_and_dilation_invariance():
    patch = builtin("plane", [(1, 2), (0, 1)])
    scales = np.array([0.25, 2 ** -2.5, 0.125])
    rep = hausdorff_vs_intrinsic(patch, scales)
    assert rep.passed
    assert rep.intrinsic == pytest.approx(7 / 6, rel=1e-6)
    dil = hausdorff_vs_intrinsic(patch.dilated(0.5), scales * 0.5)
    assert np.allclose(dil.ratios, rep.ratios, rtol=1e-6)


def test_comparability_needs_constant_degree(plane):
    with pytest.raises(PreconditionError):
        hausdorff_vs_intrinsic(plane, [0.25, 0.125])
