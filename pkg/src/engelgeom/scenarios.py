"""Built-in scenarios and scenario execution.

Each scenario produces CSV rows (see ``COLUMNS``) and a verdict. A scenario
passes when every built-in check of its report holds and its headline
number meets the optional expectation. Rows carry the scenario verdict in
the ``pass`` column.
"""

from __future__ import annotations

import traceback
from dataclasses import dataclass, field

import numpy as np

from .algebra import DEFAULT_ZERO_TOL
from .catalog import BUILTIN_IDS, EXPECTED_DEGREES, MAX_DEGREE_POINTS, builtin_terms
from .config import ConfigError, Expectation, Scenario
from .covering import dimension_estimate, hausdorff_vs_intrinsic, negligibility_decay
from .errors import EngelError
from .group import GaugeKind, HomGauge
from .measure import DEFAULT_RADII, SLOPE_SLACK, ball_intersection_measure, blowup_sequence
from .oracle import certify_group_law, certify_wedge_formula, mc_measure
from .submanifold import (ParamSubmanifold, deg3_pde_residual, global_degree,
                          intrinsic_measure)

COLUMNS = ("scenario", "name", "kind", "param", "param_value", "submanifold", "seed",
           "ratio", "value", "bracket_lo", "bracket_hi", "slope", "expected", "pass")

OVERRIDE_KEYS = ("rtol", "zero_tol", "expect_tol", "samples", "resolution", "slack")


@dataclass
class ScenarioResult:
    scenario: str
    passed: bool
    rows: list
    detail: str = ""
    failures: list = field(default_factory=list)


def build_submanifold(ref: str, definitions=None, domain=None) -> ParamSubmanifold:
    definitions = definitions or {}
    terms, default = definitions[ref] if ref in definitions else builtin_terms(ref)
    return ParamSubmanifold.from_terms(terms, default if domain is None else domain, name=ref)


def _row(scn, name, param="", param_value="", **values):
    row = dict.fromkeys(COLUMNS, "")
    row.update(scenario=scn.name, name=name, kind=scn.kind, param=param,
               param_value=param_value, submanifold=scn.submanifold, seed=scn.seed)
    if scn.expect is not None:
        row["expected"] = scn.expect.describe()
    row.update(values)
    return row


def _expect_ok(scn, x, failures, what):
    if scn.expect is not None and not scn.expect.check(x):
        failures.append(f"{what}={x:.6g} expected {scn.expect.describe()}")


def _failed_checks(checks, failures):
    failures.extend(f"check {k} failed" for k, ok in checks.items() if not ok)


def _gauge(p):
    return HomGauge(GaugeKind(p.get("gauge", "symbox")), float(p.get("gauge_scale", 1.0)))


def _run_kind(scn, sub, p, failures):
    rows = []
    tol = float(p.get("zero_tol", DEFAULT_ZERO_TOL))
    kind = scn.kind
    if kind == "degree":
        res = int(p.get("resolution", 256))
        strat = global_degree(sub, res, tol)
        rows.append(_row(scn, "global_degree", "resolution", res, value=strat.global_degree))
        _expect_ok(scn, strat.global_degree, failures, "degree")
        return rows, strat.summary()
    if kind == "blowup":
        rep = blowup_sequence(sub, p["point"], p.get("radii", DEFAULT_RADII), gauge=_gauge(p),
                              rtol=float(p.get("rtol", 1e-4)), tol=tol,
                              slack=float(p.get("slack", SLOPE_SLACK)))
        for r, m, (lo, hi), q in zip(rep.radii, rep.measures, rep.brackets, rep.ratios):
            rows.append(_row(scn, "mu", "r", r, value=m, bracket_lo=lo, bracket_hi=hi, ratio=q,
                             slope=rep.slope))
        bound = "" if rep.bound_exponent is None else rep.bound_exponent
        rows.append(_row(scn, "slope", "bound_exponent", bound, value=rep.slope,
                         slope=rep.slope))
        _failed_checks(rep.checks, failures)
        _expect_ok(scn, rep.slope, failures, "slope")
        detail = (f"d(x)={rep.point_degree}, d(Sigma)={rep.global_degree}, "
                  f"slope={rep.slope:.4f}, bound={rep.bound_exponent}")
        return rows, detail + (f"; {rep.notice}" if rep.notice else "")
    if kind == "measure":
        bm = ball_intersection_measure(sub, sub.map(p["point"]), float(p["radius"]),
                                       gauge=_gauge(p), rtol=float(p.get("rtol", 1e-4)))
        rows.append(_row(scn, "mu", "r", float(p["radius"]), value=bm.value,
                         bracket_lo=bm.bracket[0], bracket_hi=bm.bracket[1]))
        _expect_ok(scn, bm.value, failures, "measure")
        return rows, f"measure {bm.value:.8g} in [{bm.bracket[0]:.8g}, {bm.bracket[1]:.8g}]"
    if kind == "mc_check":
        x = sub.map(p["point"])
        gauge = _gauge(p)
        worst = 0.0
        for r in p.get("radii", DEFAULT_RADII):
            bm = ball_intersection_measure(sub, x, r, gauge=gauge, rtol=float(p.get("rtol", 1e-4)),
                                           check_point=False)
            mc = mc_measure(sub, x, r, int(p.get("samples", 1_000_000)), scn.seed, gauge=gauge,
                            box=bm.support)
            z = abs(bm.value - mc.estimate) / mc.stderr if mc.stderr > 0 else 0.0
            worst = max(worst, z)
            rows.append(_row(scn, "mu", "r", r, value=bm.value, bracket_lo=bm.bracket[0],
                             bracket_hi=bm.bracket[1]))
            rows.append(_row(scn, "mc", "r", r, value=mc.estimate,
                             bracket_lo=mc.estimate - 3 * mc.stderr,
                             bracket_hi=mc.estimate + 3 * mc.stderr, ratio=z))
            if not mc.agrees(bm.value):
                failures.append(f"r={r:g}: quadrature {bm.value:.8g} vs MC "
                                f"{mc.estimate:.8g} +- {mc.stderr:.3g}")
        return rows, f"largest |z| = {worst:.2f}"
    if kind == "intrinsic":
        d = int(p["degree"])
        val = intrinsic_measure(sub, d, rtol=float(p.get("rtol", 1e-6)))
        rows.append(_row(scn, "intrinsic_measure", "degree", d, value=val))
        _expect_ok(scn, val, failures, "intrinsic measure")
        return rows, f"intrinsic degree-{d} measure {val:.10g}"
    if kind == "dimension":
        rep = dimension_estimate(sub, p["scales"])
        for d, n, pm in zip(rep.scales, rep.counts, rep.premeasures):
            rows.append(_row(scn, "count", "delta", d, value=n, ratio=pm))
        rows.append(_row(scn, "dimension", "global_degree", rep.expected_degree,
                         value=rep.dimension, slope=rep.dimension))
        if not rep.monotone:
            failures.append("covering counts are not monotone in delta")
        _expect_ok(scn, rep.dimension, failures, "dimension")
        return rows, f"dimension {rep.dimension:.4f} (degree {rep.expected_degree})"
    if kind == "negligibility":
        d = int(p["degree"])
        rep = negligibility_decay(sub, p["stratum"], d, p["scales"])
        cov = rep.covering
        for delta, n, pm in zip(cov.scales, cov.counts, cov.premeasures):
            rows.append(_row(scn, "premeasure", "delta", delta, value=pm, ratio=n))
        rows.append(_row(scn, "decay_exponent", "degree", d, value=rep.decay_exponent,
                         ratio=rep.decay_factor, slope=rep.decay_exponent))
        _failed_checks(rep.checks, failures)
        _expect_ok(scn, rep.decay_exponent, failures, "decay exponent")
        return rows, f"decay factor {rep.decay_factor:.4g}, exponent {rep.decay_exponent:.4f}"
    if kind == "comparability":
        rep = hausdorff_vs_intrinsic(sub, p["scales"])
        cov = rep.covering
        for delta, pm, q in zip(cov.scales, cov.premeasures, rep.ratios):
            rows.append(_row(scn, "premeasure", "delta", delta, value=pm, ratio=q))
        rows.append(_row(scn, "intrinsic_measure", "degree", rep.degree, value=rep.intrinsic))
        _failed_checks(rep.checks, failures)
        _expect_ok(scn, float(rep.ratios[-1]), failures, "ratio")
        return rows, "ratios " + ", ".join(f"{q:.4g}" for q in rep.ratios)
    if kind == "pde":
        if "point" in p:
            res = deg3_pde_residual(sub, p["point"])
            param, pval = "point", " ".join(f"{v:g}" for v in p["point"])
        else:
            n = int(p.get("resolution", 256))
            res = deg3_pde_residual(sub, sub.domain.grid(n))
            param, pval = "resolution", n
        worst = float(np.max(np.abs(res)))
        rows.append(_row(scn, "pde_residual", param, pval, value=worst))
        _expect_ok(scn, worst, failures, "residual")
        return rows, f"max residual {worst:.3e}"
    if kind == "certify":
        n = int(p.get("samples", 10_000))
        for rep in (certify_group_law(n, scn.seed, raise_on_failure=False),
                    certify_wedge_formula(n, scn.seed, raise_on_failure=False)):
            for k, v in rep.residuals.items():
                rows.append(_row(scn, k, "samples", n, value=v,
                                 expected=f"< {rep.thresholds[k]:g}"))
            failures.extend(f"{k} residual too large" for k in rep.failures)
        return rows, f"{len(rows)} residuals checked"
    raise ConfigError(f"unknown kind {kind!r}", scn.location)


def apply_overrides(scn: Scenario, overrides: dict, seed=None) -> Scenario:
    params = dict(scn.params)
    expect = scn.expect
    for key, val in (overrides or {}).items():
        if key == "expect_tol":
            if expect is not None:
                expect = Expectation(expect.value, float(val), expect.min, expect.max)
        else:
            params[key] = val
    return Scenario(scn.name, scn.submanifold, scn.kind, params, expect,
                    scn.seed if seed is None else int(seed), scn.location)


def run_scenario(scn: Scenario, definitions=None, overrides=None, seed=None) -> ScenarioResult:
    """Execute one scenario; numerical failures become a failed verdict, not an exception."""
    scn = apply_overrides(scn, overrides, seed)
    failures = []
    try:
        sub = build_submanifold(scn.submanifold, definitions, scn.params.get("domain"))
        rows, detail = _run_kind(scn, sub, scn.params, failures)
    except EngelError as exc:
        failures.append(f"{type(exc).__name__}: {exc}")
        rows, detail = [_row(scn, "error")], traceback.format_exception_only(type(exc), exc)[-1]
    passed = not failures
    for row in rows:
        row["pass"] = passed
    return ScenarioResult(scn.name, passed, rows, detail.strip(), failures)


def _scn(name, sub, kind, expect=None, **params):
    return Scenario(name, sub, kind, params, expect, 0, f"built-in scenario {name}")


def _builtin_catalog() -> dict:
    near = Expectation
    lowdeg_cases = [
        ("lowdeg-deg45deg2", "plane", (0.0, 0.0), 2.0),
        ("lowdeg-deg45deg3", "x1x3-plane", (0.0, 0.0), 3.0),
        ("lowdeg-deg3deg2", "deg3-surface", (0.0, 0.0), 2.0),
        ("lowdeg-deg23deg1", "parabola-14", (0.0,), 1.5),
        ("lowdeg-deg3deg2curve", "parabola-34", (0.0,), 2.0),
    ]
    out = []
    for name, sub, u0, slope in lowdeg_cases:
        out.append(_scn(name, sub, "blowup", near(slope, 0.1), point=list(u0)))
    for sub in BUILTIN_IDS:
        out.append(_scn(f"bounded-{sub}", sub, "blowup", point=list(MAX_DEGREE_POINTS[sub])))
    for sub in BUILTIN_IDS:
        out.append(_scn(f"degree-{sub}", sub, "degree", near(EXPECTED_DEGREES[sub], 0.0)))
    out += [
        _scn("pde-deg3-surface", "deg3-surface", "pde", near(max=1e-12), resolution=256),
        _scn("pde-plane", "plane", "pde", near(min=0.1), point=[1.0, 0.0]),
        _scn("intrinsic-plane", "plane", "intrinsic", near(2.0 / 3.0, 1e-6), degree=4),
        _scn("intrinsic-deg3-surface", "deg3-surface", "intrinsic", near(0.5, 1e-6), degree=3,
             domain=[[0.0, 1.0], [0.0, 1.0]]),
        _scn("intrinsic-x4-line", "x4-line", "intrinsic", near(1.0, 1e-6), degree=3,
             domain=[[0.0, 1.0]]),
        _scn("dimension-plane-patch", "plane", "dimension", near(4.0, 0.3),
             domain=[[1.0, 2.0], [0.0, 1.0]], scales=[2.0 ** -k for k in (2, 2.5, 3, 3.5, 4)]),
        _scn("dimension-x4-line", "x4-line", "dimension", near(3.0, 0.3),
             scales=[2.0 ** -k for k in (2, 3, 4, 5)]),
        _scn("dimension-x1-line", "x1-line", "dimension", near(1.0, 0.1), domain=[[0.0, 1.0]],
             scales=[2.0 ** -k for k in range(3, 8)]),
    ]
    strata = [
        ("plane", [[0.0, 0.0], [-1.0, 1.0]], 4, near(3.0, 0.5)),
        ("x1x3-plane", [[0.0, 0.0], [-1.0, 1.0]], 4, None),
        ("deg3-surface", [[-1.0, 1.0], [0.0, 0.0]], 3, None),
        ("parabola-14", [[0.0, 0.0]], 3, None),
        ("parabola-34", [[0.0, 0.0]], 3, None),
    ]
    for sub, stratum, d, expect in strata:
        out.append(_scn(f"negligibility-{sub}", sub, "negligibility", expect, stratum=stratum,
                        degree=d, scales=[2.0 ** -k for k in range(2, 7)]))
    out.append(_scn("comparability-plane-patch", "plane", "comparability",
                    domain=[[1.0, 2.0], [0.0, 1.0]],
                    scales=[2.0 ** -k for k in (2, 2.5, 3, 3.5)]))
    for name, sub, u0, _ in lowdeg_cases:
        out.append(_scn(f"mc-{name}", sub, "mc_check", point=list(u0), samples=1_000_000))
    out.append(_scn("certify-group-law", "plane", "certify", samples=10_000))
    return {s.name: s for s in out}


BUILTIN_SCENARIOS = _builtin_catalog()
