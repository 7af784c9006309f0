"""Riemannian measure of ball intersections and blow-up rates.

``ball_intersection_measure`` integrates the Riemannian Jacobian over the
parameter set ``{u : dist(x, phi(u)) <= r}``. That set is cut out by the
polynomial constraints ``|z_k(u)| <= r**w_k`` with ``z = x^-1 . phi(u)`` (and,
for the symmetrised gauge, the same for ``z^-1``). Cells of an adaptive
bisection are classified as inside, outside or undecided from certified
range enclosures of those polynomials; only undecided cells are refined,
always along the axis that dominates the enclosure width. Inside cells are
integrated with tensor Gauss-Legendre rules. The inner and outer cell sums
bracket the measure at every level.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .algebra import DEFAULT_ZERO_TOL
from .errors import DomainError, ToleranceNotMetError
from .group import DEFAULT_GAUGE, WEIGHTS, GaugeKind, HomGauge, inv, inv_coords, mul_coords
from .submanifold import ParamBox, ParamSubmanifold, global_degree, pointwise_degree, riemannian_jacobian

log = logging.getLogger(__name__)

GAUSS_ORDER = 4
DEFAULT_RADII = tuple(2.0 ** -k for k in range(3, 11))
SLOPE_SLACK = 0.1
BOUNDED_RATIO_FACTOR = 3.0


@dataclass
class BallMeasure:
    """Result of a ball-intersection quadrature.

    ``levels`` holds ``(inner, estimate, outer)`` after every refinement
    level; the last entry equals ``(bracket[0], value, bracket[1])``.
    ``rigorous`` is False for callable parametrizations, where cells are
    classified from samples instead of certified enclosures. ``support`` is
    a parameter box containing every cell not proved to lie outside the
    ball, so the ball trace is inside it.
    """

    value: float
    bracket: tuple
    levels: list = field(repr=False)
    cells: int = 0
    rigorous: bool = True
    support: ParamBox | None = None


class _PolyBall:
    """Certified classifier for a polynomial submanifold."""

    rigorous = True

    def __init__(self, sub, x, gauge: HomGauge):
        xi = tuple(float(v) for v in inv(x))
        z = mul_coords(xi, sub.polys)
        self.constraints = [(p, WEIGHTS[k]) for k, p in enumerate(z)]
        if gauge.kind is GaugeKind.SYMBOX:
            self.constraints += [(p, WEIGHTS[k]) for k, p in enumerate(inv_coords(z))]
        self.constraints = [(p, w) for p, w in self.constraints if not p.is_zero()]

    def classify(self, center, half, radius):
        n, dim = center.shape
        inside = np.ones(n, dtype=bool)
        outside = np.zeros(n, dtype=bool)
        score = np.zeros((n, dim))
        for poly, w in self.constraints:
            t = radius ** w
            lo, hi, spread = poly.enclose(center, half)
            amax = np.maximum(np.abs(lo), np.abs(hi))
            amin = np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))
            ok = amax <= t
            bad = amin > t
            inside &= ok
            outside |= bad
            open_ = ~ok & ~bad
            score = np.where(open_[:, None], np.maximum(score, spread / t), score)
        return inside & ~outside, outside, score


class _SampledBall:
    """Heuristic classifier for callables: a cell is decided when 3**p samples agree."""

    rigorous = False

    def __init__(self, sub, x, gauge: HomGauge):
        self.sub = sub
        self.x = np.asarray(x, dtype=float)
        self.gauge = HomGauge(gauge.kind)
        p = sub.p
        self.offsets = np.stack(np.meshgrid(*[[-1.0, 0.0, 1.0]] * p, indexing="ij"),
                                axis=-1).reshape(-1, p)

    def classify(self, center, half, radius):
        pts = center[:, None, :] + half[:, None, :] * self.offsets[None]
        g = self.gauge.dist(self.x, self.sub.map(pts)) / radius
        inside = np.all(g <= 1.0, axis=1)
        outside = np.all(g > 1.0, axis=1)
        score = np.empty(center.shape)
        for j in range(center.shape[1]):
            plus = self.offsets[:, j] > 0
            minus = self.offsets[:, j] < 0
            score[:, j] = np.abs(g[:, plus].mean(axis=1) - g[:, minus].mean(axis=1))
        return inside, outside, score


def _gauss_rule(p):
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    grid = np.stack(np.meshgrid(*[nodes] * p, indexing="ij"), axis=-1).reshape(-1, p)
    wts = np.prod(np.stack(np.meshgrid(*[weights] * p, indexing="ij"), axis=-1).reshape(-1, p),
                  axis=1)
    return grid, wts


def _cell_integrals(sub, center, half, rule, indicator=None):
    """Gauss integrals of J over cells; with ``indicator`` also of J * 1[ball]."""
    nodes, wts = rule
    if not len(center):
        return np.zeros(0), np.zeros(0)
    pts = center[:, None, :] + half[:, None, :] * nodes[None]
    jac = riemannian_jacobian(sub, pts)
    vol = np.prod(half, axis=1)
    full = (jac * wts).sum(axis=1) * vol
    if indicator is None:
        return full, full
    part = (jac * indicator(pts) * wts).sum(axis=1) * vol
    return full, part


def _support(box, lo, hi, center, half):
    if len(center):
        lo = np.minimum(lo, (center - half).min(axis=0))
        hi = np.maximum(hi, (center + half).max(axis=0))
    if not np.all(lo <= hi):
        return None
    return ParamBox(tuple(np.maximum(lo, box.lo)), tuple(np.minimum(hi, box.hi)))


def check_on_submanifold(sub: ParamSubmanifold, x, tol: float = 1e-9):
    """Raise unless ``x`` lies on ``sub`` (Euclidean distance in coordinates)."""
    x = np.asarray(x, dtype=float)
    grid = sub.domain.grid(32 if sub.p == 2 else 256).reshape(-1, sub.p)
    d2 = np.sum((sub.map(grid) - x) ** 2, axis=-1)
    u0 = grid[np.argmin(d2)]
    if d2.min() > tol ** 2:
        res = least_squares(lambda u: sub.map(u) - x, u0, bounds=(sub.domain.lo, sub.domain.hi),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        best = float(np.linalg.norm(res.fun))
        if best > tol * (1.0 + np.linalg.norm(x)):
            raise DomainError(f"base point {x.tolist()} is not on {sub!r} (distance {best:.3g})")


def ball_intersection_measure(sub: ParamSubmanifold, x, r: float, *, gauge: HomGauge = DEFAULT_GAUGE,
                              rtol: float = 1e-4, atol: float = 0.0, max_cells: int = 1 << 20,
                              max_levels: int = 400, check_point: bool = True) -> BallMeasure:
    """Riemannian measure of ``sub`` inside the closed ball ``D(x, r)``.

    Refinement stops once the bracket width is at most
    ``max(rtol * value, atol)``; otherwise ``ToleranceNotMetError`` carries
    the estimate and the bracket. ``max_cells`` caps the number of undecided
    cells kept at one level.
    """
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    x = np.asarray(x, dtype=float).reshape(4)
    if check_point:
        check_on_submanifold(sub, x)
    radius = r / gauge.scale
    ball = (_PolyBall if sub.is_polynomial else _SampledBall)(sub, x, gauge)
    rule = _gauss_rule(sub.p)

    def indicator(pts):
        return (gauge.dist(x, sub.map(pts)) <= r).astype(float)

    box = sub.domain
    center = np.asarray(box.center)[None]
    half = (0.5 * box.widths)[None]
    inner = 0.0
    levels = []
    processed = 0
    in_lo = np.full(sub.p, np.inf)
    in_hi = np.full(sub.p, -np.inf)
    for _ in range(max_levels):
        inside, outside, score = ball.classify(center, half, radius)
        processed += len(center)
        if inside.any():
            in_lo = np.minimum(in_lo, (center[inside] - half[inside]).min(axis=0))
            in_hi = np.maximum(in_hi, (center[inside] + half[inside]).max(axis=0))
        full_in, _ = _cell_integrals(sub, center[inside], half[inside], rule)
        inner += float(np.sum(full_in))
        keep = ~inside & ~outside
        center, half, score = center[keep], half[keep], score[keep]
        full_b, part_b = _cell_integrals(sub, center, half, rule, indicator)
        outer = inner + float(np.sum(full_b))
        value = inner + float(np.sum(part_b))
        levels.append((inner, value, outer))
        if outer - inner <= max(rtol * value, atol):
            return BallMeasure(value, (inner, outer), levels, processed, ball.rigorous,
                               _support(box, in_lo, in_hi, center, half))
        if 2 * len(center) > max_cells:
            break
        # split each undecided cell in half along its dominant axis
        axis = np.argmax(np.where(half > 0, score, -1.0), axis=1)
        rows = np.arange(len(center))
        half = half.copy()
        half[rows, axis] *= 0.5
        shift = np.zeros_like(half)
        shift[rows, axis] = half[rows, axis]
        center = np.concatenate([center - shift, center + shift])
        half = np.concatenate([half, half])
    raise ToleranceNotMetError(
        f"ball measure bracket [{inner:.6g}, {outer:.6g}] wider than rtol={rtol}",
        estimate=value, bracket=(inner, outer))


def lower_bound_exponent(p: int, d_sigma: int, d_x: int):
    """Exponent ``e`` in the lower bound ``mu(Sigma, D(x, r)) >= C r**e`` proved for low-degree points.

    ``None`` when no such bound is available (maximal-degree points, or the
    degree-5 surface case, which relies on an external result).
    """
    if p == 2:
        if d_sigma >= 4 and d_x == 2:
            return 3.0
        if d_sigma >= 4 and d_x == 3:
            return 3.5
        if d_sigma == 3 and d_x == 2:
            return 2.0
    elif p == 1:
        if d_sigma >= 2 and d_x == 1:
            return 1.5
        if d_sigma == 3 and d_x == 2:
            return 2.0
    return None


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("log-log fit needs positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@dataclass
class BlowupReport:
    u0: tuple
    x: tuple
    point_degree: int
    global_degree: int
    radii: np.ndarray
    measures: np.ndarray
    brackets: np.ndarray
    ratios: np.ndarray
    slope: float
    bound_exponent: float | None
    low_degree: bool
    checks: dict
    notice: str = ""
    quasi_triangle_constant: float = float("nan")
    box_constant: float = float("nan")

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def blowup_sequence(sub: ParamSubmanifold, u0, radii=DEFAULT_RADII, *,
                    gauge: HomGauge = DEFAULT_GAUGE, rtol: float = 1e-4,
                    tol: float = DEFAULT_ZERO_TOL, resolution=256,
                    slack: float = SLOPE_SLACK) -> BlowupReport:
    """Measures of ``sub`` in shrinking balls around ``phi(u0)`` and their log-log slope.

    At a point of degree below ``d(Sigma)`` the fitted slope must stay
    ``slack`` below ``d(Sigma)`` (the ratio ``mu / r**d(Sigma)`` diverges),
    must not exceed the proved lower-bound exponent by more than ``slack``,
    and the ratio must grow strictly as ``r`` decreases. At a point of
    maximal degree the ratio must instead stay within a factor 3.
    """
    radii = np.asarray(radii, dtype=float)
    if len(radii) < 4 or np.any(np.diff(radii) >= 0) or np.any(radii <= 0):
        raise DomainError("need at least 4 strictly decreasing positive radii")
    u0 = sub._params(u0)
    x = sub.map(u0)
    d_x = pointwise_degree(sub, u0, tol).value
    d_sigma = global_degree(sub, resolution, tol).global_degree
    results = [ball_intersection_measure(sub, x, r, gauge=gauge, rtol=rtol, check_point=False)
               for r in radii]
    measures = np.array([m.value for m in results])
    brackets = np.array([m.bracket for m in results])
    ratios = measures / radii ** d_sigma
    slope = loglog_slope(radii, measures)
    bound = lower_bound_exponent(sub.p, d_sigma, d_x)
    checks = {"monotone_in_r": bool(np.all(np.diff(measures) <= 0))}
    notice = ""
    low = d_x < d_sigma
    if low:
        checks["diverges"] = slope < d_sigma - slack
        checks["ratio_increasing"] = bool(np.all(np.diff(ratios) > 0))
        if bound is not None:
            checks["within_bound"] = slope <= bound + slack
    else:
        notice = (f"base point has maximal degree {d_x}; checking boundedness of "
                  f"mu/r^{d_sigma} instead of divergence")
        checks["bounded"] = bool(ratios.max() < BOUNDED_RATIO_FACTOR * ratios.min())
    return BlowupReport(
        u0=tuple(float(v) for v in u0), x=tuple(float(v) for v in x), point_degree=d_x,
        global_degree=d_sigma, radii=radii, measures=measures, brackets=brackets,
        ratios=ratios, slope=slope, bound_exponent=bound, low_degree=low, checks=checks,
        notice=notice, quasi_triangle_constant=gauge.quasi_triangle_constant,
        box_constant=gauge.box_constant)
