"""Scenario configuration files.

A configuration is a TOML document::

    definitions = ["surfaces.toml"]      # optional, relative to this file

    [[submanifold]]                      # optional inline definitions
    id = "twisted"
    domain = [[-1.0, 1.0], [-1.0, 1.0]]
    x1 = [[[1, 0], 1.0]]                 # (exponents, coefficient) pairs
    x2 = [[[0, 1], 1.0]]
    x3 = [[[1, 1], 1.0]]
    x4 = []

    [[scenario]]
    name = "twisted-blowup"
    submanifold = "twisted"              # a built-in id or a defined one
    kind = "blowup"
    point = [0.0, 0.0]
    radii = { k_min = 3, k_max = 10 }    # or an explicit list
    expect = { value = 2.0, tol = 0.1 }

    [[scenario]]
    builtin = "lowdeg-deg3deg2"            # reuse a catalog scenario

Every problem is reported as a ``ConfigError`` carrying the file and the
offending table, so the command line can exit with status 2.
"""

from __future__ import annotations

import copy
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import BUILTIN_IDS, builtin_terms
from .errors import EngelError
from .submanifold import ParamBox

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

KINDS = ("degree", "blowup", "measure", "mc_check", "intrinsic", "dimension",
         "negligibility", "comparability", "pde", "certify")
NEEDS_POINT = ("blowup", "measure", "mc_check")
REQUIRED = {
    "measure": ("radius",),
    "intrinsic": ("degree",),
    "negligibility": ("stratum", "degree"),
}
EXPECT_KEYS = {"value", "tol", "min", "max"}


class ConfigError(EngelError, ValueError):
    """Invalid configuration; ``location`` says where."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


@dataclass(frozen=True)
class Expectation:
    """``value +- tol`` and/or bounds ``min <= x <= max`` on a scenario's headline number."""

    value: float | None = None
    tol: float = 0.0
    min: float | None = None
    max: float | None = None

    def check(self, x: float) -> bool:
        if not np.isfinite(x):
            return False
        if self.value is not None and abs(x - self.value) > self.tol:
            return False
        if self.min is not None and x < self.min:
            return False
        if self.max is not None and x > self.max:
            return False
        return True

    def describe(self) -> str:
        parts = []
        if self.value is not None:
            parts.append(f"{self.value:g} +- {self.tol:g}")
        if self.min is not None:
            parts.append(f">= {self.min:g}")
        if self.max is not None:
            parts.append(f"<= {self.max:g}")
        return " and ".join(parts)


@dataclass
class Scenario:
    """One experiment: a submanifold reference, an operation kind and its parameters."""

    name: str
    submanifold: str
    kind: str
    params: dict = field(default_factory=dict)
    expect: Expectation | None = None
    seed: int = 0
    location: str = ""


@dataclass
class Config:
    scenarios: list
    definitions: dict  # id -> (coordinate terms, domain)
    path: str = ""


def scales_from(spec, where):
    """Scales as a list, or ``{k_min, k_max, step}`` meaning ``2**-k``."""
    if isinstance(spec, dict):
        unknown = set(spec) - {"k_min", "k_max", "step"}
        if unknown or not {"k_min", "k_max"} <= set(spec):
            raise ConfigError("geometric scales need k_min, k_max and optionally step", where)
        step = float(spec.get("step", 1.0))
        if step <= 0 or spec["k_max"] < spec["k_min"]:
            raise ConfigError("need k_max >= k_min and step > 0", where)
        ks = np.arange(float(spec["k_min"]), float(spec["k_max"]) + 1e-9, step)
        return [float(2.0 ** -k) for k in ks]
    try:
        out = [float(v) for v in spec]
    except (TypeError, ValueError):
        raise ConfigError(f"expected a list of numbers, got {spec!r}", where) from None
    if not out or any(not v > 0 for v in out):
        raise ConfigError("scales must be positive", where)
    return out


def _box(spec, where) -> ParamBox:
    try:
        return ParamBox.from_intervals(spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameter box {spec!r} ({exc})", where) from None


def _terms(spec, nvars, where):
    out = []
    if not isinstance(spec, list):
        raise ConfigError("coordinate must be a list of (exponents, coefficient) pairs", where)
    for item in spec:
        try:
            exps, coef = item
            exps = [int(e) for e in (exps if isinstance(exps, list) else [exps])]
            coef = float(coef)
        except (TypeError, ValueError):
            raise ConfigError(f"bad term {item!r}; expected [[exponents...], coefficient]",
                              where) from None
        if len(exps) != nvars or min(exps) < 0:
            raise ConfigError(f"term {item!r} needs {nvars} nonnegative exponent(s)", where)
        out.append((tuple(exps), coef))
    return out


def _parse_definition(table, where):
    if "id" not in table or "domain" not in table:
        raise ConfigError("a submanifold needs 'id' and 'domain'", where)
    box = _box(table["domain"], f"{where}.domain")
    if box.dim not in (1, 2):
        raise ConfigError("only curves and surfaces are supported", f"{where}.domain")
    unknown = set(table) - {"id", "domain", "x1", "x2", "x3", "x4", "name"}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", where)
    terms = [_terms(table.get(f"x{k}", []), box.dim, f"{where}.x{k}") for k in range(1, 5)]
    intervals = tuple(zip(box.lo, box.hi))
    return str(table["id"]), (terms, intervals)


def _load_toml(path: Path, where: str):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}", where) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}", str(path)) from None


def _definitions_from(doc, path, where, seen):
    defs = {}
    for k, rel in enumerate(doc.get("definitions", [])):
        sub_path = (path.parent / rel).resolve()
        if sub_path in seen:
            raise ConfigError(f"definition files include each other: {sub_path}", where)
        sub_doc = _load_toml(sub_path, f"{path}: definitions[{k}]")
        defs.update(_definitions_from(sub_doc, sub_path, str(sub_path), seen | {sub_path}))
    for k, table in enumerate(doc.get("submanifold", [])):
        sid, value = _parse_definition(table, f"{where}: submanifold[{k}]")
        if sid in BUILTIN_IDS:
            raise ConfigError(f"id {sid!r} shadows a built-in", f"{where}: submanifold[{k}]")
        defs[sid] = value
    return defs


def domain_of(ref, definitions):
    if ref in definitions:
        return definitions[ref][1]
    return builtin_terms(ref)[1]


def parse_scenario(table, definitions, where, builtin_scenarios=None) -> Scenario:
    """Validate one scenario table (a dict) into a ``Scenario``."""
    table = dict(table)
    if "builtin" in table:
        from .scenarios import BUILTIN_SCENARIOS
        catalog = builtin_scenarios or BUILTIN_SCENARIOS
        key = table.pop("builtin")
        if key not in catalog:
            raise ConfigError(f"unknown built-in scenario {key!r}", where)
        base = copy.deepcopy(catalog[key])
        if table:
            raise ConfigError(f"keys {sorted(table)} are not allowed next to 'builtin'", where)
        base.location = where
        return base
    for key in ("name", "submanifold", "kind"):
        if key not in table:
            raise ConfigError(f"missing required key {key!r}", where)
    name = str(table.pop("name"))
    where = f"{where} ({name})"
    ref = str(table.pop("submanifold"))
    kind = str(table.pop("kind"))
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", where)
    if ref not in definitions and ref not in BUILTIN_IDS:
        raise ConfigError(f"unknown submanifold {ref!r}", where)
    seed = table.pop("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer", where)
    expect = None
    if "expect" in table:
        spec = table.pop("expect")
        if not isinstance(spec, dict) or set(spec) - EXPECT_KEYS or not spec:
            raise ConfigError(f"expect must be a table with keys from {sorted(EXPECT_KEYS)}",
                              where)
        expect = Expectation(**{k: float(v) for k, v in spec.items()})
    params = table
    for key in REQUIRED.get(kind, ()):
        if key not in params:
            raise ConfigError(f"kind {kind!r} needs {key!r}", where)
    domain = ParamBox.from_intervals(domain_of(ref, definitions))
    if "domain" in params:
        domain = _box(params["domain"], f"{where}.domain")
        params["domain"] = [list(iv) for iv in zip(domain.lo, domain.hi)]
    if kind in NEEDS_POINT and "point" not in params:
        raise ConfigError(f"kind {kind!r} needs 'point'", where)
    if "point" in params:
        point = np.atleast_1d(np.asarray(params["point"], dtype=float))
        if point.shape != (domain.dim,) or not domain.contains(point):
            raise ConfigError(f"point {params['point']!r} is not in the domain {domain}", where)
        params["point"] = [float(v) for v in point]
    for key in ("radii", "scales"):
        if key in params:
            params[key] = scales_from(params[key], f"{where}.{key}")
    if "stratum" in params:
        stratum = _box(params["stratum"], f"{where}.stratum")
        if not domain.contains_box(stratum):
            raise ConfigError(f"stratum {stratum} is not inside the domain {domain}", where)
        params["stratum"] = [list(iv) for iv in zip(stratum.lo, stratum.hi)]
    return Scenario(name, ref, kind, params, expect, seed, where)


def load_config(path) -> Config:
    """Read and validate a configuration file."""
    path = Path(path)
    doc = _load_toml(path, str(path))
    where = str(path)
    unknown = set(doc) - {"definitions", "submanifold", "scenario"}
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}", where)
    definitions = _definitions_from(doc, path.resolve(), where, {path.resolve()})
    scenarios = [parse_scenario(t, definitions, f"{where}: scenario[{k}]")
                 for k, t in enumerate(doc.get("scenario", []))]
    names = [s.name for s in scenarios]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ConfigError(f"duplicate scenario names {dupes}", where)
    return Config(scenarios, definitions, str(path))
