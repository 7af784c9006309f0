"""Vectors and 2-vectors in the left-invariant frame, and their degrees.

A 2-vector is stored as the six coefficients of ``X_i ^ X_j`` in the fixed
order ``(c12, c13, c23, c14, c24, c34)``, grouped by weight ``d_i + d_j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTangentError, DomainError
from .group import WEIGHTS, coord_to_frame

DEFAULT_ZERO_TOL = 1e-9

PAIRS = ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3))
PAIR_LABELS = ("c12", "c13", "c23", "c14", "c24", "c34")
PAIR_WEIGHTS = tuple(WEIGHTS[i] + WEIGHTS[j] for i, j in PAIRS)  # (2, 3, 3, 4, 4, 5)

VECTOR_DEGREES = (1, 2, 3)
BIVECTOR_DEGREES = (2, 3, 4, 5)


@dataclass(frozen=True)
class FrameVector:
    a1: float
    a2: float
    a3: float
    a4: float

    @classmethod
    def from_array(cls, a) -> "FrameVector":
        return cls(*map(float, np.asarray(a, dtype=float).reshape(4)))

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3, self.a4])

    def __array__(self, dtype=None, copy=None):
        a = self.as_array()
        return a if dtype is None else a.astype(dtype)


@dataclass(frozen=True)
class Frame2Vector:
    c12: float
    c13: float
    c23: float
    c14: float
    c24: float
    c34: float

    @classmethod
    def from_array(cls, c) -> "Frame2Vector":
        return cls(*map(float, np.asarray(c, dtype=float).reshape(6)))

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, k) for k in PAIR_LABELS])

    def __array__(self, dtype=None, copy=None):
        c = self.as_array()
        return c if dtype is None else c.astype(dtype)


@dataclass(frozen=True)
class DegreeValue:
    """Outcome of a degree classification.

    ``margin`` is the largest coefficient magnitude in the weight group that
    decided the degree and ``suppressed`` the largest magnitude among the
    higher-weight coefficients that were treated as zero. A result is
    borderline when ``margin < 10 * zero_tolerance``.
    """

    value: int
    zero_tolerance: float
    margin: float
    suppressed: float

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.value == int(other)
        if isinstance(other, DegreeValue):
            return (self.value, self.zero_tolerance, self.margin, self.suppressed) == (
                other.value, other.zero_tolerance, other.margin, other.suppressed)
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    @property
    def borderline(self) -> bool:
        return self.margin < 10.0 * self.zero_tolerance


def wedge_closed_form(x, v, w) -> np.ndarray:
    """Frame coefficients of ``v ^ w`` at ``x`` via the 2x2-minor expansion.

    With ``m_ij = v_i w_j - v_j w_i`` (the minors of the 4x2 matrix ``[v w]``)
    and ``t = x1``::

        c12 = m12
        c13 = m13 - t m12
        c23 = m23
        c14 = m14 - t m13 + t**2/2 m12
        c24 = m24 - t m23
        c34 = m34 + t**2/2 m23 - t m24
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    t = x[..., 0]

    def m(i, j):
        return v[..., i] * w[..., j] - v[..., j] * w[..., i]

    m12, m13, m14 = m(0, 1), m(0, 2), m(0, 3)
    m23, m24, m34 = m(1, 2), m(1, 3), m(2, 3)
    h = 0.5 * t * t
    c = (
        m12,
        m13 - t * m12,
        m23,
        m14 - t * m13 + h * m12,
        m24 - t * m23,
        m34 + h * m23 - t * m24,
    )
    return np.stack(np.broadcast_arrays(*c), axis=-1)


def wedge_frame_product(x, v, w) -> np.ndarray:
    """Same coefficients, computed as ``a_i b_j - a_j b_i`` of the frame components."""
    a = coord_to_frame(x, v)
    b = coord_to_frame(x, w)
    return np.stack([a[..., i] * b[..., j] - a[..., j] * b[..., i] for i, j in PAIRS], axis=-1)


def wedge_in_frame(x, v, w) -> np.ndarray:
    """Frame 2-vector of ``v ^ w`` for coordinate tangent vectors at ``x``."""
    return wedge_closed_form(x, v, w)


def _classify(groups, weights, tol):
    """Highest weight whose group has a coefficient above ``tol``.

    ``groups`` is a list of per-group max-abs arrays, ordered like ``weights``.
    Returns ``(degree, margin, suppressed)`` arrays; degree 0 means all zero.
    """
    shape = np.shape(groups[0])
    degree = np.zeros(shape, dtype=int)
    margin = np.zeros(shape)
    suppressed = np.zeros(shape)
    decided = np.zeros(shape, dtype=bool)
    for g, wt in sorted(zip(groups, weights), key=lambda p: -p[1]):
        hit = ~decided & (g > tol)
        degree = np.where(hit, wt, degree)
        margin = np.where(hit, g, margin)
        suppressed = np.where(decided, suppressed, np.maximum(suppressed, np.where(hit, 0.0, g)))
        decided |= hit
    return degree, margin, suppressed


def _check_tol(tol):
    if not tol > 0:
        raise DomainError(f"zero tolerance must be positive, got {tol}")


def vector_degrees(a, tol: float = DEFAULT_ZERO_TOL):
    """Vectorised vector degree: arrays ``(degree, margin, suppressed)``; degree 0 if zero."""
    _check_tol(tol)
    a = np.abs(np.asarray(a, dtype=float))
    groups = [np.maximum(a[..., 0], a[..., 1]), a[..., 2], a[..., 3]]
    return _classify(groups, VECTOR_DEGREES, tol)


def bivector_degrees(c, tol: float = DEFAULT_ZERO_TOL):
    """Vectorised 2-vector degree: arrays ``(degree, margin, suppressed)``; degree 0 if zero."""
    _check_tol(tol)
    c = np.abs(np.asarray(c, dtype=float))
    groups = [
        c[..., 0],
        np.maximum(c[..., 1], c[..., 2]),
        np.maximum(c[..., 3], c[..., 4]),
        c[..., 5],
    ]
    return _classify(groups, BIVECTOR_DEGREES, tol)


def _single(fn, arr, tol, what):
    arr = np.asarray(arr, dtype=float)
    degree, margin, suppressed = fn(arr, tol)
    if degree == 0:
        raise DegenerateTangentError(f"{what} {arr.tolist()} vanishes to tolerance {tol}")
    return DegreeValue(int(degree), tol, float(margin), float(suppressed))


def vector_degree(a, tol: float = DEFAULT_ZERO_TOL) -> DegreeValue:
    """Degree ``max{d_i : |a_i| > tol}`` of a frame vector (weights 1, 1, 2, 3)."""
    return _single(vector_degrees, a, tol, "frame vector")


def bivector_degree(c, tol: float = DEFAULT_ZERO_TOL) -> DegreeValue:
    """Degree of a frame 2-vector: 5 if c34, else 4 if c14/c24, else 3 if c13/c23, else 2."""
    return _single(bivector_degrees, c, tol, "frame 2-vector")


def _component_norm(arr, d, weights, legal):
    if d not in legal:
        raise DomainError(f"degree {d} is not one of {legal}")
    arr = np.asarray(arr, dtype=float)
    idx = [k for k, w in enumerate(weights) if w == d]
    return np.sqrt(np.sum(arr[..., idx] ** 2, axis=-1))


def degree_d_component_norm(c, d: int) -> np.ndarray:
    """Norm of the weight-``d`` part of a frame 2-vector (the frame is orthonormal)."""
    return _component_norm(c, d, PAIR_WEIGHTS, BIVECTOR_DEGREES)


def vector_component_norm(a, d: int) -> np.ndarray:
    """Norm of the weight-``d`` part of a frame vector."""
    return _component_norm(a, d, WEIGHTS, VECTOR_DEGREES)
