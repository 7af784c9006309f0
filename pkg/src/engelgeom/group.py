"""Engel group arithmetic in exponential coordinates of the second kind.

Points are arrays whose last axis has length 4, ``(x1, x2, x3, x4)``, with
homogeneous weights ``(1, 1, 2, 3)``. The group law

    x . y = (x1 + y1, x2 + y2, x3 + y3 + x1 y2,
             x4 + y4 + x1 y3 + x1**2 y2 / 2)

is the unique polynomial law for which the frame

    X1 = d1,  X2 = d2 + x1 d3 + x1**2/2 d4,  X3 = d3 + x1 d4,  X4 = d4

is left invariant. All functions broadcast over leading axes.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError

WEIGHTS = (1, 1, 2, 3)
IDENTITY = np.zeros(4)


def mul_coords(x: Sequence, y: Sequence) -> tuple:
    """Group product on coordinate sequences.

    Works for any ring-like coordinates (floats, numpy arrays, polynomials),
    which is how left translations of polynomial submanifolds are built.
    """
    x1, x2, x3, x4 = x
    y1, y2, y3, y4 = y
    return (
        x1 + y1,
        x2 + y2,
        x3 + y3 + x1 * y2,
        x4 + y4 + x1 * y3 + 0.5 * (x1 * x1) * y2,
    )


def inv_coords(x: Sequence) -> tuple:
    x1, x2, x3, x4 = x
    return (
        -1.0 * x1,
        -1.0 * x2,
        -1.0 * x3 + x1 * x2,
        -1.0 * x4 + x1 * x3 - 0.5 * (x1 * x1) * x2,
    )


def _split(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise DomainError(f"group points need a trailing axis of length 4, got shape {x.shape}")
    return x, (x[..., 0], x[..., 1], x[..., 2], x[..., 3])


def mul(x, y) -> np.ndarray:
    """Product ``x . y`` of (arrays of) group points."""
    _, xs = _split(x)
    _, ys = _split(y)
    return np.stack(np.broadcast_arrays(*mul_coords(xs, ys)), axis=-1)


def inv(x) -> np.ndarray:
    """Group inverse; ``mul(x, inv(x))`` is the identity."""
    _, xs = _split(x)
    return np.stack(np.broadcast_arrays(*inv_coords(xs)), axis=-1)


def dilate(r, x) -> np.ndarray:
    """Intrinsic dilation ``(r x1, r x2, r**2 x3, r**3 x4)``; requires ``r > 0``."""
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError(f"dilation factor must be positive, got {r}")
    x, _ = _split(x)
    r = r[..., None]
    return x * r ** np.array(WEIGHTS, dtype=float)


def frame_at(x) -> np.ndarray:
    """Columns X1..X4 of the left-invariant frame at ``x``, as a 4x4 matrix.

    ``frame_at(x) @ a`` converts frame coefficients ``a`` to coordinates.
    """
    x, (x1, *_) = _split(x)
    m = np.zeros(x.shape[:-1] + (4, 4))
    m[..., 0, 0] = 1.0
    m[..., 1, 1] = 1.0
    m[..., 2, 1] = x1
    m[..., 3, 1] = 0.5 * x1 * x1
    m[..., 2, 2] = 1.0
    m[..., 3, 2] = x1
    m[..., 3, 3] = 1.0
    return m


def coord_to_frame(x, v) -> np.ndarray:
    """Coefficients of the coordinate vector ``v`` in the frame at ``x``."""
    _, (x1, *_) = _split(x)
    _, (v1, v2, v3, v4) = _split(v)
    return np.stack(
        np.broadcast_arrays(v1, v2, v3 - x1 * v2, v4 - x1 * v3 + 0.5 * x1 * x1 * v2),
        axis=-1,
    )


def push_dilation(r, v) -> np.ndarray:
    """Differential of ``dilate(r, .)`` applied to a coordinate vector (it is linear)."""
    return dilate(r, v)


def raw_gauge(x) -> np.ndarray:
    """Box gauge ``max(|x1|, |x2|, |x3|**(1/2), |x4|**(1/3))``. Its unit ball is ``Box_1``."""
    _, (x1, x2, x3, x4) = _split(x)
    return np.maximum.reduce(
        [np.abs(x1), np.abs(x2), np.sqrt(np.abs(x3)), np.cbrt(np.abs(x4))]
    )


class GaugeKind(str, enum.Enum):
    SYMBOX = "symbox"
    BOX = "box"


@dataclass(frozen=True)
class HomGauge:
    """Homogeneous quasi-distance of box type.

    ``SYMBOX`` (the default) is ``max(n(x), n(x^-1))`` with ``n`` the raw box
    gauge; it is symmetric but satisfies only a quasi-triangle inequality.
    ``BOX`` is the raw gauge itself, whose balls at the origin are exactly
    ``Box_r``. ``scale`` multiplies the gauge, which is handy for checking
    that fitted exponents do not depend on the choice of gauge.
    """

    kind: GaugeKind = GaugeKind.SYMBOX
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", GaugeKind(self.kind))
        if not self.scale > 0:
            raise DomainError(f"gauge scale must be positive, got {self.scale}")

    def __call__(self, x) -> np.ndarray:
        n = raw_gauge(x)
        if self.kind is GaugeKind.SYMBOX:
            n = np.maximum(n, raw_gauge(inv(x)))
        return self.scale * n

    def dist(self, x, y) -> np.ndarray:
        return self(mul(inv(x), y))

    @property
    def box_constant(self) -> float:
        """Largest ``lam`` with ``Box_{lam r}`` inside ``D_r`` (and ``D_r`` inside ``Box_{r/lam}``)."""
        if self.kind is GaugeKind.BOX:
            lam = 1.0
        else:
            lam = _symbox_box_constant()
        # D_r of the scaled gauge is D_{r/scale} of the unscaled one
        return lam * min(self.scale, 1.0 / self.scale)

    @property
    def quasi_triangle_constant(self) -> float:
        return quasi_triangle_constant(self.kind)


DEFAULT_GAUGE = HomGauge()


def gauge(x) -> np.ndarray:
    """Symmetrised box gauge, the default homogeneous gauge."""
    return DEFAULT_GAUGE(x)


def dist(x, y) -> np.ndarray:
    """Left-invariant, symmetric, 1-homogeneous quasi-distance ``gauge(x^-1 y)``."""
    return DEFAULT_GAUGE.dist(x, y)


def _box_vertices() -> np.ndarray:
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * 4, indexing="ij")).reshape(4, -1).T
    return signs


@functools.lru_cache(maxsize=None)
def _symbox_box_constant(samples: int = 200_000, seed: int = 0) -> float:
    # n(x^-1) over Box_1 is maximal at a vertex; random samples confirm it.
    rng = np.random.default_rng(seed)
    pts = np.concatenate([_box_vertices(), rng.uniform(-1.0, 1.0, size=(samples, 4))])
    return float(1.0 / raw_gauge(inv(pts)).max())


def _random_points(rng, n, spread=True):
    pts = rng.uniform(-1.0, 1.0, size=(n, 4))
    if spread:
        scales = np.exp(rng.uniform(np.log(1e-2), 0.0, size=n))
        pts = dilate(scales, pts)
    return pts


@functools.lru_cache(maxsize=None)
def quasi_triangle_constant(kind: GaugeKind = GaugeKind.SYMBOX, samples: int = 100_000,
                            seed: int = 0) -> float:
    """Monte Carlo estimate of ``sup dist(x,z) / (dist(x,y) + dist(y,z))``.

    Triples are built as ``y = x . a``, ``z = y . b`` with ``a``, ``b`` random
    increments dilated by log-uniform factors, so that both comparable and very
    unequal side lengths are probed. The result is cached per gauge kind.
    """
    g = HomGauge(kind)
    rng = np.random.default_rng(seed)
    x = _random_points(rng, samples, spread=False)
    y = mul(x, _random_points(rng, samples))
    z = mul(y, _random_points(rng, samples))
    num = g.dist(x, z)
    den = g.dist(x, y) + g.dist(y, z)
    ok = den > 0
    return float(max(1.0, (num[ok] / den[ok]).max()))


@dataclass(frozen=True)
class GroupPoint:
    """A single point of the Engel group; a thin wrapper over a length-4 array."""

    x1: float
    x2: float
    x3: float
    x4: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise DomainError(f"group point coordinates must be finite: {self}")

    @classmethod
    def from_array(cls, a) -> "GroupPoint":
        a = np.asarray(a, dtype=float).reshape(4)
        return cls(*map(float, a))

    @classmethod
    def identity(cls) -> "GroupPoint":
        return cls(0.0, 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4], dtype=float)

    def __array__(self, dtype=None, copy=None):
        a = self.as_array()
        return a if dtype is None else a.astype(dtype)

    def __mul__(self, other: "GroupPoint") -> "GroupPoint":
        return GroupPoint.from_array(mul(self.as_array(), np.asarray(other)))

    def inverse(self) -> "GroupPoint":
        return GroupPoint.from_array(inv(self.as_array()))

    def dilate(self, r: float) -> "GroupPoint":
        return GroupPoint.from_array(dilate(r, self.as_array()))
