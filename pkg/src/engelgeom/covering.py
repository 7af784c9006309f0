"""Greedy covers of sampled submanifolds by gauge balls.

Covers are upper estimates: the submanifold is sampled on a parameter grid
whose spacing is chosen per axis so that one grid step moves the image by
at most ``delta / oversample`` in the gauge, then balls of radius ``delta``
centred at samples are opened until every sample is covered. Scanning the
grid in row-major order, each new ball is centred at the member of the
first uncovered sample's ball that lies furthest along the scan, so balls
overlap little and a unit horizontal segment needs about ``1 / (2 delta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError, ResolutionError
from .group import DEFAULT_GAUGE, HomGauge
from .measure import loglog_slope
from .submanifold import ParamBox, ParamSubmanifold, global_degree, intrinsic_measure

# grid steps per delta, finest first; the finest one within SAMPLE_BUDGET is used
OVERSAMPLE_LADDER = (32.0, 16.0, 8.0, 4.0, 2.0)
SAMPLE_BUDGET = 1 << 22
MAX_SAMPLES = 1 << 23
ISOLATED_FRACTION = 0.5
_PILOT = 17


@dataclass
class Cover:
    """A greedy cover: ball centres (parameter points) and the sampling used."""

    delta: float
    centers: np.ndarray
    nodes: tuple
    new_per_ball: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.centers)

    @property
    def samples(self) -> int:
        return int(np.prod(self.nodes))


def _step_distance(sub, gauge, pilots, axis, h, hi):
    q = pilots.copy()
    forward = q[:, axis] + h <= hi[axis]
    q[:, axis] = np.where(forward, q[:, axis] + h, q[:, axis] - h)
    return float(gauge.dist(sub.map(pilots), sub.map(q)).max())


def choose_oversample(sub: ParamSubmanifold, delta: float, gauge: HomGauge = DEFAULT_GAUGE,
                      budget: int = SAMPLE_BUDGET) -> float:
    """Finest entry of ``OVERSAMPLE_LADDER`` whose grid at ``delta`` fits in ``budget`` samples."""
    for m in OVERSAMPLE_LADDER:
        if np.prod(sample_spacing(sub, delta, gauge, m), dtype=float) <= budget:
            return m
    return OVERSAMPLE_LADDER[-1]


def sample_spacing(sub: ParamSubmanifold, delta: float, gauge: HomGauge = DEFAULT_GAUGE,
                   oversample: float = 2.0) -> tuple:
    """Nodes per axis so that one step moves the image by at most ``delta / oversample``.

    The step length is found by bisection on a pilot grid of the domain.
    Degenerate axes get a single node.
    """
    box = sub.domain
    lo, hi, widths = np.asarray(box.lo), np.asarray(box.hi), box.widths
    pilots = box.grid(_PILOT - 1).reshape(-1, sub.p)
    target = delta / oversample
    nodes = []
    for j in range(sub.p):
        if widths[j] == 0:
            nodes.append(1)
            continue
        if _step_distance(sub, gauge, pilots, j, widths[j], hi) <= target:
            nodes.append(2)
            continue
        a, b = np.log(widths[j]) - 60.0, np.log(widths[j])  # log step: ok at a, too big at b
        for _ in range(60):
            mid = 0.5 * (a + b)
            if _step_distance(sub, gauge, pilots, j, np.exp(mid), hi) <= target:
                a = mid
            else:
                b = mid
        nodes.append(int(np.ceil(widths[j] / np.exp(a))) + 1)
    return tuple(nodes)


def greedy_cover(sub: ParamSubmanifold, delta: float, *, gauge: HomGauge = DEFAULT_GAUGE,
                 oversample: float | None = None, nodes=None,
                 max_samples: int = MAX_SAMPLES) -> Cover:
    """Greedy cover of the sampled submanifold by closed balls of radius ``delta``.

    ``oversample`` defaults to ``choose_oversample``; ``nodes`` fixes the
    sample count per axis instead of the automatic spacing. Raises
    ``ResolutionError`` when the grid would exceed ``max_samples`` or when most balls contain a single sample, which means
    the grid is too coarse for ``delta``.
    """
    if not delta > 0:
        raise DomainError(f"covering scale must be positive, got {delta}")
    box = sub.domain
    oversample = oversample or choose_oversample(sub, delta, gauge)
    if nodes is None:
        nodes = sample_spacing(sub, delta, gauge, oversample)
    nodes = tuple(1 if w == 0 else max(2, int(n)) for n, w in zip(
        np.broadcast_to(np.asarray(nodes), (sub.p,)), box.widths))
    if np.prod(nodes, dtype=float) > max_samples:
        raise ResolutionError(
            f"delta={delta:g} needs {nodes} samples, more than max_samples={max_samples}")
    axes = [np.array([a]) if n == 1 else np.linspace(a, b, n)
            for a, b, n in zip(box.lo, box.hi, nodes)]
    params = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    points = sub.map(params)
    shape = np.array(nodes)
    start = np.full(sub.p, int(np.ceil(2 * oversample)) + 1)

    def members(idx):
        # samples within delta of sample idx; the index window doubles until its
        # interior faces carry no member
        k = start.copy()
        centre = points[tuple(idx)]
        while True:
            lo = np.maximum(idx - k, 0)
            hi = np.minimum(idx + k + 1, shape)
            window = tuple(slice(a, b) for a, b in zip(lo, hi))
            inside = gauge.dist(centre, points[window]) <= delta
            grow = False
            for j in range(sub.p):
                if (lo[j] > 0 and inside.take(0, axis=j).any()) or (
                        hi[j] < shape[j] and inside.take(-1, axis=j).any()):
                    k[j] *= 2
                    grow = True
            if not grow:
                return lo, window, inside

    covered = np.zeros(nodes, dtype=bool)
    flat = covered.reshape(-1)
    centers = []
    new_counts = []
    pos = 0
    total = flat.size
    while pos < total:
        chunk = flat[pos:pos + 4096]
        if chunk.all():
            pos += len(chunk)
            continue
        pos += int(np.argmin(chunk))
        p_idx = np.array(np.unravel_index(pos, nodes))
        lo, _, inside = members(p_idx)
        cand = np.argwhere(inside) + lo
        c_idx = cand[np.argmax(np.ravel_multi_index(tuple(cand.T), nodes))]
        _, window, inside = members(c_idx)
        before = int(covered[window].sum())
        covered[window] |= inside
        new_counts.append(int(covered[window].sum()) - before)
        centers.append(params[tuple(c_idx)])
    new_counts = np.array(new_counts)
    singles = np.count_nonzero(new_counts == 1)
    if len(new_counts) > 1 and singles > ISOLATED_FRACTION * len(new_counts):
        raise ResolutionError(
            f"{singles} of {len(new_counts)} balls contain a single sample at delta={delta:g}; "
            f"the grid {nodes} is too coarse")
    return Cover(delta, np.array(centers), nodes, new_counts)


def covering_count(sub: ParamSubmanifold, delta: float, **kwargs) -> int:
    """Number of balls in a greedy ``delta``-cover (an upper covering estimate)."""
    return greedy_cover(sub, delta, **kwargs).count


def _check_scales(scales, minimum):
    scales = np.asarray(scales, dtype=float)
    if len(scales) < minimum or np.any(scales <= 0):
        raise DomainError(f"need at least {minimum} positive scales")
    return scales


@dataclass
class CoveringReport:
    """Covering counts over a range of scales.

    ``premeasures`` are ``N(delta) * delta**exponent``; ``dimension`` is the
    least-squares slope of ``log N`` against ``log(1/delta)``.
    """

    scales: np.ndarray
    counts: np.ndarray
    exponent: float
    premeasures: np.ndarray
    dimension: float
    expected_degree: int | None = None
    strategy: str = "greedy"

    @property
    def monotone(self) -> bool:
        order = np.argsort(self.scales)
        return bool(np.all(np.diff(self.counts[order]) <= 0))


def _report(sub, scales, exponent, expected, **kwargs):
    if kwargs.get("oversample") is None and kwargs.get("nodes") is None:
        # one sampling density for all scales keeps the greedy bias scale-free
        kwargs["oversample"] = choose_oversample(sub, float(np.min(scales)),
                                                 kwargs.get("gauge", DEFAULT_GAUGE))
    counts = np.array([covering_count(sub, d, **kwargs) for d in scales])
    dim = loglog_slope(1.0 / scales, counts) if np.ptp(counts) else 0.0
    if exponent is None:
        exponent = dim
    return CoveringReport(scales, counts, float(exponent), counts * scales ** exponent, dim,
                          expected)


def dimension_estimate(sub: ParamSubmanifold, scales, **kwargs) -> CoveringReport:
    """Covering dimension of ``sub`` from greedy counts at ``scales`` (at least 4)."""
    scales = _check_scales(scales, 4)
    return _report(sub, scales, None, global_degree(sub).global_degree, **kwargs)


@dataclass
class DecayReport:
    """Premeasures ``N(delta) * delta**d`` of a stratum.

    ``decay_exponent`` is the fitted slope of ``log premeasure`` against
    ``log delta``; ``decay_factor`` is first over last premeasure.
    """

    covering: CoveringReport
    degree: int
    decay_exponent: float
    decay_factor: float
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def negligibility_decay(sub: ParamSubmanifold, stratum, d: int, scales,
                        min_factor: float = 4.0, **kwargs) -> DecayReport:
    """Premeasure decay of the low-degree stratum ``stratum`` (a parameter box) at exponent ``d``.

    ``scales`` must be decreasing. Checks that the premeasures never grow and
    that the last is at least ``min_factor`` times smaller than the first.
    """
    scales = _check_scales(scales, 2)
    if np.any(np.diff(scales) >= 0):
        raise DomainError("negligibility scales must be strictly decreasing")
    box = stratum if isinstance(stratum, ParamBox) else ParamBox.from_intervals(stratum)
    rep = _report(sub.restrict(box), scales, d, None, **kwargs)
    pm = rep.premeasures
    factor = float(pm[0] / pm[-1])
    checks = {"nonincreasing": bool(np.all(np.diff(pm) <= 0)), "decays": factor >= min_factor}
    return DecayReport(rep, d, loglog_slope(scales, pm), factor, checks)


@dataclass
class ComparabilityReport:
    """Spherical-type upper estimates ``N(delta) delta**d`` against the intrinsic measure."""

    covering: CoveringReport
    degree: int
    intrinsic: float
    ratios: np.ndarray
    checks: dict
    bounds: tuple = (0.05, 20.0)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def hausdorff_vs_intrinsic(sub: ParamSubmanifold, scales, bounds=(0.05, 20.0),
                           resolution=256, **kwargs) -> ComparabilityReport:
    """Ratios of covering premeasures to the intrinsic measure on a constant-degree patch.

    Raises ``PreconditionError`` if sampled pointwise degrees are not all
    equal. Checks that successive ratios differ by less than a factor 2 and
    that all lie within ``bounds``.
    """
    scales = _check_scales(scales, 2)
    strat = global_degree(sub, resolution)
    if len(strat.low_degree_points):
        raise PreconditionError(f"patch does not have constant degree: {strat.summary()}")
    d = strat.global_degree
    rep = _report(sub, scales, d, d, **kwargs)
    mu = intrinsic_measure(sub, d)
    ratios = rep.premeasures / mu
    steps = ratios[1:] / ratios[:-1]
    checks = {
        "stable": bool(np.all((steps < 2.0) & (steps > 0.5))),
        "bounded": bool(np.all((ratios >= bounds[0]) & (ratios <= bounds[1]))),
    }
    return ComparabilityReport(rep, d, mu, ratios, checks, tuple(bounds))
