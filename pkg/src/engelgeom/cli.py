"""Command-line front end: ``engelgeom run | describe | list | certify``.

Exit status is 0 when every expectation holds, 1 when some scenario fails
and 2 for unusable input (parse errors, missing files, unknown ids).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .catalog import BUILTIN_IDS, builtin_terms
from .config import ConfigError, load_config
from .errors import EngelError
from .oracle import certify_group_law, certify_wedge_formula
from .scenarios import (BUILTIN_SCENARIOS, COLUMNS, OVERRIDE_KEYS, build_submanifold,
                        run_scenario)
from .submanifold import deg3_pde_residual, global_degree

OUT_DIR_ENV = "ENGELGEOM_OUT_DIR"
DEFAULT_OUT_DIR = "engelgeom-out"
CSV_NAME = "results.csv"
SUMMARY_NAME = "summary.txt"

log = logging.getLogger("engelgeom")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(rows, path: Path):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in COLUMNS])
    path.write_text(buf.getvalue())


def _parse_overrides(items):
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or key not in OVERRIDE_KEYS:
            raise ConfigError(f"bad override {item!r}; use KEY=VALUE with KEY in "
                              f"{', '.join(OVERRIDE_KEYS)}", "--tolerance-overrides")
        try:
            out[key] = float(val)
        except ValueError:
            raise ConfigError(f"override {item!r} needs a number", "--tolerance-overrides") \
                from None
    return out


def _select(args):
    definitions = {}
    if args.config:
        cfg = load_config(args.config)
        scenarios, definitions = cfg.scenarios, cfg.definitions
    else:
        scenarios = list(BUILTIN_SCENARIOS.values())
    if args.scenario:
        pool = {s.name: s for s in scenarios}
        missing = [n for n in args.scenario if n not in pool]
        if missing:
            raise ConfigError(f"unknown scenario(s) {missing}", "--scenario")
        scenarios = [pool[n] for n in args.scenario]
    return scenarios, definitions


def _run_all(scenarios, definitions, overrides, seed, jobs):
    tasks = [(s, definitions, overrides, seed) for s in scenarios]
    if jobs <= 1 or len(tasks) <= 1:
        return [run_scenario(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map keeps the input order, so output does not depend on scheduling
        return list(pool.map(run_scenario, *zip(*tasks)))


def cmd_run(args) -> int:
    scenarios, definitions = _select(args)
    overrides = _parse_overrides(args.tolerance_overrides)
    out_dir = Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    results = _run_all(scenarios, definitions, overrides, args.seed, jobs)
    rows = [row for res in results for row in res.rows]
    lines = []
    for res in results:
        lines.append(f"{'PASS' if res.passed else 'FAIL'} {res.scenario}: {res.detail}")
        lines.extend(f"     - {f}" for f in res.failures)
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} scenarios passed")
    write_csv(rows, out_dir / CSV_NAME)
    (out_dir / SUMMARY_NAME).write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"wrote {out_dir / CSV_NAME} and {out_dir / SUMMARY_NAME}")
    return 0 if n_pass == len(results) else 1


def describe_text(ref: str, definitions=None) -> str:
    sub = build_submanifold(ref, definitions)
    strat = global_degree(sub)
    intervals = " x ".join(f"[{a:g}, {b:g}]" for a, b in zip(sub.domain.lo, sub.domain.hi))
    lines = [f"{ref}", f"  domain: {intervals}", f"  global degree: {strat.global_degree}",
             f"  stratification: {strat.summary()}"]
    if strat.borderline_points.size:
        lines.append(f"  borderline nodes: {len(strat.borderline_points)}")
    if sub.p == 2 and sub.is_graph():
        res = deg3_pde_residual(sub, sub.domain.grid(256))
        lines.append(f"  degree-3 PDE residual max: {np.max(np.abs(res)):.3e}")
    return "\n".join(lines)


def cmd_describe(args) -> int:
    definitions = load_config(args.config).definitions if args.config else {}
    if args.id not in definitions and args.id not in BUILTIN_IDS:
        raise ConfigError(f"unknown submanifold id {args.id!r}", "describe")
    print(describe_text(args.id, definitions))
    return 0


def cmd_list(args) -> int:
    print("submanifolds:")
    for sid in BUILTIN_IDS:
        _, domain = builtin_terms(sid)
        print(f"  {sid:<14} p={len(domain)}")
    print("scenarios:")
    for name, scn in BUILTIN_SCENARIOS.items():
        print(f"  {name:<34} {scn.kind:<14} {scn.submanifold}")
    return 0


def cmd_certify(args) -> int:
    ok = True
    for title, fn in (("group law", certify_group_law), ("wedge formula", certify_wedge_formula)):
        rep = fn(args.samples, args.seed, raise_on_failure=False)
        print(f"{title}: {'PASS' if rep.passed else 'FAIL'} ({rep.samples} samples, "
              f"seed {rep.seed}, {rep.seconds:.2f} s)")
        for line in rep.lines():
            print("  " + line)
        ok &= rep.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engelgeom",
                                     description="Degree and measure experiments in the Engel group")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scenarios and write CSV plus a summary")
    run.add_argument("--config", help="TOML scenario file (default: the built-in suite)")
    run.add_argument("--scenario", action="append",
                     help="run only this scenario (repeatable)")
    run.add_argument("--out-dir", help=f"output directory (default: ${OUT_DIR_ENV} or "
                     f"./{DEFAULT_OUT_DIR})")
    run.add_argument("--seed", type=int, help="override every scenario seed")
    run.add_argument("--jobs", type=int, help="worker processes (default: CPU count)")
    run.add_argument("--tolerance-overrides", nargs="*", metavar="KEY=VAL",
                     help=f"override numerical settings; keys: {', '.join(OVERRIDE_KEYS)}")
    run.set_defaults(func=cmd_run)

    desc = sub.add_parser("describe", help="degree and stratification of a submanifold")
    desc.add_argument("id")
    desc.add_argument("--config", help="TOML file with extra definitions")
    desc.set_defaults(func=cmd_describe)

    lst = sub.add_parser("list", help="list built-in submanifolds and scenarios")
    lst.set_defaults(func=cmd_list)

    cert = sub.add_parser("certify", help="re-run the group-law and wedge oracles")
    cert.add_argument("--samples", type=int, default=10_000)
    cert.add_argument("--seed", type=int, default=0)
    cert.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"engelgeom: error: {exc}", file=sys.stderr)
        return 2
    except EngelError as exc:
        print(f"engelgeom: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
