"""Parametrized curves and surfaces in the Engel group.

Polynomial parametrizations are the preferred representation: their
derivatives are exact and they admit certified range enclosures. Opaque
callables are accepted too; missing Jacobians are then replaced by central
differences with step ``FD_STEP``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import algebra
from .algebra import DEFAULT_ZERO_TOL
from .errors import (DegenerateTangentError, DegreeRangeError, DomainError, ShapeError,
                     ToleranceNotMetError)
from .group import WEIGHTS, coord_to_frame, frame_at, inv_coords, mul, mul_coords
from .polynomial import Polynomial

FD_STEP = 1e-6
LEGAL_DEGREES = {1: (1, 2, 3), 2: (3, 4, 5)}
MEASURE_DEGREES = {1: algebra.VECTOR_DEGREES, 2: algebra.BIVECTOR_DEGREES}
CHUNK = 1 << 18


@dataclass(frozen=True)
class ParamBox:
    """Closed box ``[lo_1, hi_1] x ... x [lo_p, hi_p]``; sides may be degenerate."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or not lo:
            raise DomainError("box bounds must be nonempty and of equal length")
        if any(not (a <= b) for a, b in zip(lo, hi)) or not np.all(np.isfinite(lo + hi)):
            raise DomainError(f"invalid box bounds lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_intervals(cls, intervals) -> "ParamBox":
        intervals = np.asarray(intervals, dtype=float).reshape(-1, 2)
        return cls(tuple(intervals[:, 0]), tuple(intervals[:, 1]))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> np.ndarray:
        return np.subtract(self.hi, self.lo)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lo) + np.asarray(self.hi))

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, u, tol: float = 1e-12) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.dim == 1 and (u.ndim == 0 or u.shape[-1] != 1):
            u = u[..., None]
        return np.all((u >= np.asarray(self.lo) - tol) & (u <= np.asarray(self.hi) + tol), axis=-1)

    def contains_box(self, other: "ParamBox", tol: float = 1e-12) -> bool:
        return other.dim == self.dim and bool(
            np.all(np.asarray(other.lo) >= np.asarray(self.lo) - tol)
            and np.all(np.asarray(other.hi) <= np.asarray(self.hi) + tol))

    def axes(self, resolution) -> list:
        """Node coordinates per axis: ``resolution`` intervals, endpoints included."""
        res = np.broadcast_to(np.asarray(resolution, dtype=int), (self.dim,))
        return [np.array([a]) if a == b else np.linspace(a, b, int(n) + 1)
                for a, b, n in zip(self.lo, self.hi, res)]

    def grid(self, resolution) -> np.ndarray:
        """All grid nodes, shape ``(n_1, ..., n_p, p)``."""
        return np.stack(np.meshgrid(*self.axes(resolution), indexing="ij"), axis=-1)


def _as_box(domain) -> ParamBox:
    return domain if isinstance(domain, ParamBox) else ParamBox.from_intervals(domain)


class ParamSubmanifold:
    """A ``p``-dimensional immersed patch ``phi: U -> R^4`` (``p = 1`` or ``2``).

    Parameters
    ----------
    map : callable
        ``u`` of shape ``(..., p)`` to points of shape ``(..., 4)``.
    domain : ParamBox or sequence of ``(lo, hi)`` pairs
    jacobian : callable, optional
        ``u`` to the ``(..., 4, p)`` matrix of partials; central differences
        with step ``FD_STEP`` are used when omitted.
    polys : sequence of 4 Polynomial, optional
        Coordinate polynomials. When given, ``map`` and ``jacobian`` are
        derived from them and may be ``None``.
    """

    dim: int = 0

    def __init__(self, map: Callable | None = None, domain=None, jacobian: Callable | None = None,
                 polys: Sequence[Polynomial] | None = None, name: str = "",
                 check: bool = True):
        if domain is None:
            raise DomainError("a parameter domain is required")
        self.domain = _as_box(domain)
        if self.dim and self.domain.dim != self.dim:
            raise DomainError(f"{type(self).__name__} needs a {self.dim}-dimensional domain")
        self.name = name
        if polys is not None:
            polys = tuple(polys)
            if len(polys) != 4 or any(p.nvars != self.domain.dim for p in polys):
                raise ShapeError(f"need 4 coordinate polynomials in {self.domain.dim} variable(s)")
            self.polys = polys
            self._dpolys = tuple(tuple(p.deriv(j) for j in range(self.domain.dim)) for p in polys)
            self._map = None
            self._jac = None
        else:
            if map is None:
                raise ShapeError("either polynomials or a map callable is required")
            self.polys = None
            self._map = map
            self._jac = jacobian
        if check:
            self.check_immersion()

    # construction helpers ----------------------------------------------

    @classmethod
    def from_terms(cls, coord_terms, domain, name: str = "") -> "ParamSubmanifold":
        """Polynomial submanifold from per-coordinate ``(exponents, coefficient)`` lists."""
        box = _as_box(domain)
        if len(coord_terms) != 4:
            raise ShapeError("need terms for exactly 4 coordinates")
        polys = [Polynomial.from_terms(t, box.dim) for t in coord_terms]
        return _for_dim(box.dim)(polys=polys, domain=box, name=name)

    @property
    def p(self) -> int:
        return self.domain.dim

    @property
    def is_polynomial(self) -> bool:
        return self.polys is not None

    def __repr__(self):
        label = self.name or ("polynomial" if self.is_polynomial else "callable")
        return f"{type(self).__name__}({label!r}, domain={self.domain.lo}..{self.domain.hi})"

    # evaluation ----------------------------------------------------------

    def _params(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.p == 1 and (u.ndim == 0 or u.shape[-1] != 1):
            u = u[..., None]
        if u.shape[-1] != self.p:
            raise ShapeError(f"parameters need a trailing axis of length {self.p}")
        return u

    def map(self, u) -> np.ndarray:
        u = self._params(u)
        if self.polys is not None:
            return np.stack([p(u) for p in self.polys], axis=-1)
        return np.asarray(self._map(u), dtype=float)

    def jacobian(self, u) -> np.ndarray:
        """Partials ``d phi / d u_j`` as a ``(..., 4, p)`` array."""
        u = self._params(u)
        if self.polys is not None:
            cols = [np.stack([dp[j](u) for dp in self._dpolys], axis=-1) for j in range(self.p)]
            return np.stack(cols, axis=-1)
        if self._jac is not None:
            return np.asarray(self._jac(u), dtype=float)
        return self.fd_jacobian(u, FD_STEP)

    def fd_jacobian(self, u, step: float = FD_STEP) -> np.ndarray:
        u = self._params(u)
        cols = []
        for j in range(self.p):
            e = np.zeros(self.p)
            e[j] = step
            cols.append((self.map(u + e) - self.map(u - e)) / (2.0 * step))
        return np.stack(cols, axis=-1)

    def frame_tangent(self, u) -> np.ndarray:
        """Tangent in the frame: 4 vector coefficients (curves) or 6 2-vector ones (surfaces)."""
        u = self._params(u)
        x = self.map(u)
        jac = self.jacobian(u)
        if self.p == 1:
            return coord_to_frame(x, jac[..., 0])
        return algebra.wedge_closed_form(x, jac[..., 0], jac[..., 1])

    def degrees(self, u, tol: float = DEFAULT_ZERO_TOL):
        """Vectorised pointwise degrees ``(degree, margin, suppressed)``; 0 marks a degenerate tangent."""
        t = self.frame_tangent(u)
        fn = algebra.vector_degrees if self.p == 1 else algebra.bivector_degrees
        return fn(t, tol)

    def check_immersion(self, resolution: int = 16, tol: float = 1e-12):
        u = self.domain.grid(resolution).reshape(-1, self.p)
        norms = np.linalg.norm(self.frame_tangent(u), axis=-1)
        bad = norms <= tol
        if np.any(bad):
            raise DegenerateTangentError(
                f"{self!r} is not an immersion near u={u[np.argmax(bad)].tolist()}")

    # transformations -----------------------------------------------------

    def _derived(self, polys=None, map=None, jacobian=None, domain=None, name=None):
        return type(self)(map=map, jacobian=jacobian, polys=polys,
                          domain=domain or self.domain, name=self.name if name is None else name,
                          check=False)

    def left_translate(self, x) -> "ParamSubmanifold":
        """The submanifold ``x . Sigma``, with the same parameter domain."""
        x = np.asarray(x, dtype=float).reshape(4)
        if self.polys is not None:
            xs = tuple(float(v) for v in x)
            return self._derived(polys=mul_coords(xs, self.polys))
        dl = frame_at(x)  # differential of the (affine) left translation
        return self._derived(map=lambda u: mul(x, self.map(u)),
                             jacobian=lambda u: dl @ self.jacobian(u))

    def dilated(self, r: float) -> "ParamSubmanifold":
        """``delta_r o phi`` over the same domain."""
        if not r > 0:
            raise DomainError(f"dilation factor must be positive, got {r}")
        s = np.array([r ** w for w in WEIGHTS])
        if self.polys is not None:
            return self._derived(polys=[float(k) * p for k, p in zip(s, self.polys)])
        return self._derived(map=lambda u: self.map(u) * s,
                             jacobian=lambda u: self.jacobian(u) * s[:, None])

    def reparametrized_box(self, box) -> "ParamSubmanifold":
        """Compose with the affine map sending ``box`` onto the current domain."""
        box = _as_box(box)
        lo, w = np.asarray(self.domain.lo), self.domain.widths
        blo, bw = np.asarray(box.lo), box.widths
        scale = np.where(bw > 0, w / np.where(bw > 0, bw, 1.0), 0.0)
        if self.polys is not None:
            subs = [
                Polynomial.from_terms([([1 if k == j else 0 for k in range(self.p)], scale[j]),
                                       ([0] * self.p, lo[j] - scale[j] * blo[j])], self.p)
                for j in range(self.p)
            ]
            return self._derived(polys=[_compose(p, subs) for p in self.polys], domain=box)

        def affine(u):
            return lo + (self._params(u) - blo) * scale

        return self._derived(map=lambda u: self.map(affine(u)),
                             jacobian=lambda u: self.jacobian(affine(u)) * scale, domain=box)

    def restrict(self, box) -> "ParamSubmanifold":
        box = _as_box(box)
        if not self.domain.contains_box(box):
            raise DomainError(f"{box} is not inside the domain {self.domain}")
        return self._derived(polys=self.polys, map=self._map, jacobian=self._jac, domain=box)

    def is_graph(self, tol: float = 1e-12) -> bool:
        """True if ``phi(u) = (u1, u2, phi3, phi4)`` (surfaces only)."""
        if self.p != 2:
            return False
        if self.polys is not None:
            return all(self.polys[k] == Polynomial.variable(k, 2) for k in range(2))
        u = self.domain.grid(8).reshape(-1, 2)
        return bool(np.all(np.abs(self.map(u)[:, :2] - u) <= tol))

    def inverse_polys(self):
        """Coordinate polynomials of ``phi(u)^-1``."""
        return inv_coords(self.polys)


def _compose(p: Polynomial, subs: Sequence[Polynomial]) -> Polynomial:
    out = Polynomial.constant(0.0, subs[0].nvars)
    for exps, c in p.terms():
        term = Polynomial.constant(c, subs[0].nvars)
        for s, e in zip(subs, exps):
            term = term * (s ** e)
        out = out + term
    return out


class ParamSurface(ParamSubmanifold):
    dim = 2


class ParamCurve(ParamSubmanifold):
    dim = 1


def _for_dim(p):
    try:
        return {1: ParamCurve, 2: ParamSurface}[p]
    except KeyError:
        raise DomainError(f"only curves and surfaces are supported, got dimension {p}") from None


# operations ---------------------------------------------------------------


def _single_param(sub, u):
    u = sub._params(u)
    if u.shape != (sub.p,):
        raise ShapeError("expected a single parameter point")
    if not sub.domain.contains(u):
        raise DomainError(f"parameter {u.tolist()} lies outside {sub.domain}")
    return u


def pointwise_degree(sub: ParamSubmanifold, u, tol: float = DEFAULT_ZERO_TOL) -> algebra.DegreeValue:
    """Degree of the tangent vector / 2-vector at ``phi(u)``."""
    u = _single_param(sub, u)
    t = sub.frame_tangent(u)
    try:
        if sub.p == 1:
            return algebra.vector_degree(t, tol)
        return algebra.bivector_degree(t, tol)
    except DegenerateTangentError as exc:
        raise DegenerateTangentError(f"immersion violated at u={u.tolist()}: {exc}") from None


@dataclass
class StratificationReport:
    """Degrees sampled on a node grid of the domain.

    ``degrees[i, j]`` is the degree at node ``(axes[0][i], axes[1][j])``;
    ``low_degree_points`` lists the nodes whose degree is below the global one.
    """

    resolution: tuple
    axes: list
    degrees: np.ndarray
    global_degree: int
    low_degree_points: np.ndarray
    low_degree_values: np.ndarray
    borderline_points: np.ndarray
    zero_tolerance: float
    param_names: tuple = field(default=("u1", "u2"))

    @property
    def low_degree_set(self) -> dict:
        """Low-degree nodes grouped by their degree."""
        return {int(d): self.low_degree_points[self.low_degree_values == d]
                for d in np.unique(self.low_degree_values)}

    def _locus(self, pts):
        fixed = [j for j in range(pts.shape[1]) if np.ptp(pts[:, j]) == 0]
        names = self.param_names
        if len(fixed) == pts.shape[1]:
            if len(names) == 1:
                return f"{{{names[0]}={pts[0, 0]:g}}}"
            return "{u=(" + ", ".join(f"{v:g}" for v in pts[0]) + ")}"
        if fixed:
            return "{" + ", ".join(f"{names[j]}={pts[0, j]:g}" for j in fixed) + "}"
        return f"{{{len(pts)} sampled points}}"

    def summary(self) -> str:
        parts = [f"degree {self.global_degree}"]
        if not len(self.low_degree_points):
            return parts[0] + " everywhere"
        for d, pts in sorted(self.low_degree_set.items()):
            parts.append(f"degree-{d} locus {self._locus(pts)}")
        return "; ".join(parts)

    def low_degree_box(self, degree: int | None = None) -> ParamBox:
        """Bounding box of the low-degree nodes (of one degree, if given)."""
        pts = self.low_degree_points if degree is None else self.low_degree_set[degree]
        if not len(pts):
            raise DomainError("no low-degree points were sampled")
        return ParamBox(tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))


def global_degree(sub: ParamSubmanifold, resolution=256,
                  tol: float = DEFAULT_ZERO_TOL) -> StratificationReport:
    """Sample pointwise degrees on a node grid and take their maximum.

    ``resolution`` is the number of intervals per axis (an int or one per
    axis, each at least 2); nodes include the endpoints.
    """
    res = tuple(int(n) for n in np.broadcast_to(np.asarray(resolution), (sub.p,)))
    if min(res) < 2:
        raise DomainError(f"grid resolution must be at least 2 per axis, got {res}")
    grid = sub.domain.grid(res)
    shape = grid.shape[:-1]
    flat = grid.reshape(-1, sub.p)
    degree = np.empty(len(flat), dtype=int)
    margin = np.empty(len(flat))
    for s in range(0, len(flat), CHUNK):
        d, m, _ = sub.degrees(flat[s:s + CHUNK], tol)
        degree[s:s + CHUNK] = d
        margin[s:s + CHUNK] = m
    if np.any(degree == 0):
        bad = flat[np.argmax(degree == 0)]
        raise DegenerateTangentError(f"immersion violated at u={bad.tolist()}")
    top = int(degree.max())
    if top not in LEGAL_DEGREES[sub.p]:
        raise DegreeRangeError(
            f"degree {top} is impossible for a {sub.p}-dimensional submanifold "
            f"(legal: {LEGAL_DEGREES[sub.p]})")
    low = degree < top
    return StratificationReport(
        resolution=res,
        axes=sub.domain.axes(res),
        degrees=degree.reshape(shape),
        global_degree=top,
        low_degree_points=flat[low],
        low_degree_values=degree[low],
        borderline_points=flat[margin < 10.0 * tol],
        zero_tolerance=tol,
        param_names=("t",) if sub.p == 1 else ("u1", "u2"),
    )


def riemannian_jacobian(sub: ParamSubmanifold, u) -> np.ndarray:
    """Riemannian Jacobian: norm of the frame tangent (the frame is orthonormal)."""
    return np.linalg.norm(sub.frame_tangent(u), axis=-1)


def deg3_pde_residual(sub: ParamSubmanifold, u) -> np.ndarray:
    """The three constraints ``c14 = c24 = c34 = 0`` for a graph ``(u1, u2, phi3, phi4)``.

    Returns an array ``(..., 3)``; all entries vanish exactly where the
    pointwise degree is at most 3.
    """
    if sub.p != 2 or not sub.is_graph():
        raise ShapeError(f"{sub!r} is not a surface in graph form (u1, u2, phi3, phi4)")
    c = sub.frame_tangent(u)
    return c[..., 3:6]


def intrinsic_measure(sub: ParamSubmanifold, d: int, rtol: float = 1e-6, atol: float = 0.0,
                      max_cells: int = 1 << 22) -> float:
    """Integral over the domain of the norm of the degree-``d`` part of the tangent.

    Uses midpoint sums on ``2**k`` cells per axis, ``k = 0, 1, ...``, with one
    Richardson step ``(4 M_k - M_{k-1}) / 3``; stops when two successive
    extrapolants agree to ``max(rtol * |R_k|, atol)``.
    """
    if d not in MEASURE_DEGREES[sub.p]:
        raise DomainError(f"degree {d} is not meaningful for p={sub.p}")
    if sub.domain.volume == 0.0:
        return 0.0
    norm = algebra.vector_component_norm if sub.p == 1 else algebra.degree_d_component_norm

    def integrand(u):
        return norm(sub.frame_tangent(u), d)

    lo = np.asarray(sub.domain.lo)
    w = sub.domain.widths
    prev_m = prev_r = None
    r = None
    k = 0
    while (2 ** k) ** sub.p <= max_cells:
        n = 2 ** k
        m = _midpoint_sum(integrand, lo, w, n, sub.p)
        if prev_m is not None:
            r = (4.0 * m - prev_m) / 3.0
            if prev_r is not None and abs(r - prev_r) <= max(rtol * abs(r), atol):
                return float(r)
            prev_r = r
        prev_m = m
        k += 1
    raise ToleranceNotMetError(
        f"intrinsic measure did not converge to rtol={rtol} within {max_cells} cells",
        estimate=r if r is not None else prev_m)


def _midpoint_sum(fn, lo, w, n, p):
    h = w / n
    centers = [lo[j] + h[j] * (np.arange(n) + 0.5) for j in range(p)]
    total = 0.0
    if p == 1:
        for s in range(0, n, CHUNK):
            total += float(np.sum(fn(centers[0][s:s + CHUNK, None])))
    else:
        rows = max(1, CHUNK // n)
        for s in range(0, n, rows):
            u = np.stack(np.meshgrid(centers[0][s:s + rows], centers[1], indexing="ij"), axis=-1)
            total += float(np.sum(fn(u)))
    return total * float(np.prod(h))


def fd_jacobian_error(sub: ParamSubmanifold, samples: int = 64, step: float = 1e-5,
                      seed: int = 0) -> float:
    """Max abs difference between the supplied Jacobian and central differences."""
    rng = np.random.default_rng(seed)
    lo, hi = np.asarray(sub.domain.lo), np.asarray(sub.domain.hi)
    u = rng.uniform(lo + step, hi - step, size=(samples, sub.p))
    return float(np.max(np.abs(sub.jacobian(u) - sub.fd_jacobian(u, step))))

