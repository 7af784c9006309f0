"""Brute-force cross-checks for the group law, the frame and the measures.

These live in the library, not only in the tests, so a user can re-certify
the numerics on their own platform (``engelgeom certify``). The group
operations are injectable, which is how negative controls are run.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import group
from .algebra import wedge_closed_form, wedge_frame_product
from .errors import CertificationError, DomainError
from .group import DEFAULT_GAUGE, HomGauge
from .submanifold import ParamBox, ParamSubmanifold, riemannian_jacobian

ALGEBRAIC_TOL = 1e-12
FD_TOL = 1e-6
FD_STEP = 1e-6
MIN_GROUP_SAMPLES = 1000
MIN_MC_SAMPLES = 10_000
MC_CHUNK = 1 << 16


class UndersampledWarning(RuntimeWarning):
    """No Monte Carlo sample fell into the ball."""


@dataclass
class CertificationReport:
    """Max residual per check, the threshold it was held to, and the verdict."""

    residuals: dict
    thresholds: dict
    samples: int
    seed: int
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list:
        return [f"{k:<22} {v:.3e}  (< {self.thresholds[k]:.0e})  "
                f"{'ok' if k not in self.failures else 'FAIL'}" for k, v in self.residuals.items()]


def _finish(residuals, thresholds, samples, seed, start, raise_on_failure, what):
    failures = [k for k, v in residuals.items() if not v < thresholds[k]]
    report = CertificationReport(residuals, thresholds, samples, seed,
                                 time.perf_counter() - start, failures)
    if failures and raise_on_failure:
        raise CertificationError(f"{what} certification failed: {', '.join(failures)}", report)
    return report


def _rel(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(b))))


def certify_group_law(samples: int = 10_000, seed: int = 0, *, mul=group.mul, inv=group.inv,
                      frame=group.frame_at, weights=group.WEIGHTS, step: float = FD_STEP,
                      raise_on_failure: bool = True) -> CertificationReport:
    """Check the group law, dilations and the frame on random samples.

    Algebraic identities (associativity, identity, inverse, dilations being
    automorphisms, homogeneity of the frame) are held to relative residual
    ``1e-12``; finite-difference checks (frame fields are ``d/dt x . t e_i``
    and satisfy ``[X1, X2] = X3``, ``[X1, X3] = X4``, all other brackets
    zero) to ``1e-6``.
    """
    if samples < MIN_GROUP_SAMPLES:
        raise DomainError(f"need at least {MIN_GROUP_SAMPLES} samples, got {samples}")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    x, y, z = rng.uniform(-1.0, 1.0, size=(3, samples, 4))
    r = rng.uniform(0.1, 3.0, size=(samples, 1))
    w = np.asarray(weights, dtype=float)
    e = np.zeros(4)

    def dil(x):
        return x * r ** w

    res = {
        "associativity": _rel(mul(mul(x, y), z), mul(x, mul(y, z))),
        "identity": max(_rel(mul(x, e), x), _rel(mul(e, x), x)),
        "inverse": max(_rel(mul(x, inv(x)), e), _rel(mul(inv(x), x), e)),
        "dilation": _rel(dil(mul(x, y)), mul(dil(x), dil(y))),
    }
    fx = frame(x)
    # d(delta_r) X_i(x) = r**w_i X_i(delta_r x); fx[n, k, i] is component k of X_i
    res["frame_homogeneity"] = _rel(fx * r[:, None, :] ** w[None, :, None] / r[:, None] ** w,
                                    frame(dil(x)))
    basis = np.eye(4)
    fd = np.stack([(mul(x, step * basis[i]) - mul(x, -step * basis[i])) / (2 * step)
                   for i in range(4)], axis=-1)
    res["left_invariance"] = float(np.max(np.abs(fd - fx)))

    def dframe(i):
        # directional derivatives of every field along X_i
        v = fx[..., i]
        return (frame(x + step * v) - frame(x - step * v)) / (2 * step)

    d = [dframe(i) for i in range(4)]
    expected = {(0, 1): 2, (0, 2): 3}
    worst = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            bracket = d[i][..., j] - d[j][..., i]
            target = fx[..., expected[(i, j)]] if (i, j) in expected else 0.0
            worst = max(worst, float(np.max(np.abs(bracket - target))))
    res["brackets"] = worst
    thresholds = {k: ALGEBRAIC_TOL for k in res}
    thresholds["left_invariance"] = thresholds["brackets"] = FD_TOL
    return _finish(res, thresholds, samples, seed, start, raise_on_failure, "group law")


def certify_wedge_formula(samples: int = 10_000, seed: int = 0, *, wedge=wedge_closed_form,
                          frame=group.frame_at,
                          raise_on_failure: bool = True) -> CertificationReport:
    """Compare the closed-form frame 2-vector with frame products and a linear solve."""
    if samples < MIN_GROUP_SAMPLES:
        raise DomainError(f"need at least {MIN_GROUP_SAMPLES} samples, got {samples}")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    x, v, w = rng.uniform(-1.0, 1.0, size=(3, samples, 4))
    c = wedge(x, v, w)
    f = frame(x)
    a = np.linalg.solve(f, v[..., None])[..., 0]
    b = np.linalg.solve(f, w[..., None])[..., 0]
    solved = np.stack([a[:, i] * b[:, j] - a[:, j] * b[:, i]
                       for i, j in ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3))], axis=-1)
    res = {
        "frame_product": _rel(c, wedge_frame_product(x, v, w)),
        "linear_solve": _rel(c, solved),
        "antisymmetry": _rel(wedge(x, w, v), -c),
    }
    thresholds = {k: ALGEBRAIC_TOL for k in res}
    # the solve goes through LU and loses a few digits against the closed form
    thresholds["linear_solve"] = 1e-10
    return _finish(res, thresholds, samples, seed, start, raise_on_failure, "wedge formula")


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float
    samples: int
    hits: int
    seed: int
    box: ParamBox

    def agrees(self, value: float, sigmas: float = 3.0, rel_floor: float = 1e-12) -> bool:
        """``|value - estimate| <= sigmas * stderr``, plus a roundoff floor.

        The floor matters when the ball trace fills the sampling box and the
        integrand is nearly constant, so that the standard error rounds to 0.
        """
        floor = rel_floor * max(abs(value), abs(self.estimate))
        return abs(value - self.estimate) <= sigmas * self.stderr + floor


def mc_measure(sub: ParamSubmanifold, x, r: float, samples: int = 1_000_000, seed: int = 0, *,
               gauge: HomGauge = DEFAULT_GAUGE, box=None) -> MCEstimate:
    """Monte Carlo estimate of the Riemannian measure of ``sub`` in ``D(x, r)``.

    Samples are uniform in ``box`` (default: the whole parameter domain),
    which must contain the parameter set of the ball trace for the estimate
    to be unbiased. Draws are made in fixed-size chunks, so a given seed
    always gives the same estimate.
    """
    if samples < MIN_MC_SAMPLES:
        raise DomainError(f"need at least {MIN_MC_SAMPLES} samples, got {samples}")
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    box = sub.domain if box is None else (box if isinstance(box, ParamBox)
                                          else ParamBox.from_intervals(box))
    if not sub.domain.contains_box(box):
        raise DomainError(f"sampling box {box} is not inside the domain {sub.domain}")
    x = np.asarray(x, dtype=float).reshape(4)
    rng = np.random.default_rng(seed)
    vol = float(np.prod(np.where(box.widths > 0, box.widths, 1.0)))
    # chunk means and squared deviations are merged pairwise (Chan et al.), which
    # keeps the variance accurate when the integrand is nearly constant
    count, mean, m2 = 0, 0.0, 0.0
    hits = 0
    for s in range(0, samples, MC_CHUNK):
        n = min(MC_CHUNK, samples - s)
        u = rng.uniform(box.lo, box.hi, size=(n, sub.p))
        inside = gauge.dist(x, sub.map(u)) <= r
        f = np.where(inside, riemannian_jacobian(sub, u), 0.0) * vol
        hits += int(inside.sum())
        c_mean = float(f.mean())
        c_m2 = float(np.sum((f - c_mean) ** 2))
        delta = c_mean - mean
        total = count + n
        mean += delta * n / total
        m2 += c_m2 + delta * delta * count * n / total
        count = total
    var = m2 / (samples - 1)
    if hits == 0:
        warnings.warn(f"no sample out of {samples} fell into D(x, {r:g}); the estimate 0 is "
                      "undersampled", UndersampledWarning, stacklevel=2)
    return MCEstimate(mean, float(np.sqrt(var / samples)), samples, hits, seed, box)
