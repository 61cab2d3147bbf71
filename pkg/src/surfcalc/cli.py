"""Command line entry point: ``surfcalc run`` and ``surfcalc list``.

Exit codes: 0 all checks pass, 1 a residual check failed, 2 configuration
error (no report files are written), 3 runtime or numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, geometry, moving
from .config import load
from .errors import ConfigParse, SurfcalcError
from .fields import SCALAR_FIELDS, VECTOR_FIELDS
from .front_tracking import SIMULATIONS
from .runner import GR_SCENARIOS, KINDS, Overrides, build, execute
from .scenarios import JUMP_CASES

SCHEMA = "surfcalc.report/v1"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3
DEFAULT_OUT = "surfcalc-out"


def _plain(obj):
    """JSON-safe copy: numpy scalars and arrays become Python values, non-finite floats strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


def collect_configs(path):
    p = Path(path)
    if p.is_dir():
        files = sorted(q for q in p.rglob("*.cfg") if q.is_file())
        if not files:
            raise ConfigParse("directory contains no .cfg files", str(p), None)
        return files
    return [p]


def build_report(outcomes, timestamp=None):
    checks = [c for o in outcomes for c in o.checks]
    errors = [o for o in outcomes if o.error is not None]
    return _plain({
        "schema": SCHEMA,
        "version": __version__,
        "generated_at": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "scenarios": [o.to_dict() for o in outcomes],
        "summary": {
            "scenarios": len(outcomes),
            "checks": len(checks),
            "passed": sum(c.passed for c in checks),
            "failed": sum(not c.passed for c in checks),
            "errors": len(errors),
            "all_passed": not errors and all(c.passed for c in checks),
        },
    })


def write_series(outcomes, path):
    rows = [{"scenario": o.name, **r} for o in outcomes for r in o.series]
    columns = ["scenario"]
    for r in rows:
        columns.extend(k for k in r if k not in columns)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, restval="", lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                             for k, v in r.items()})


def _exit_code(outcomes):
    if any(o.error is not None for o in outcomes):
        return EXIT_RUNTIME
    if all(o.passed for o in outcomes):
        return EXIT_OK
    return EXIT_FAIL


def _summary_lines(outcomes):
    for o in outcomes:
        if o.error is not None:
            yield f"ERROR {o.name}: {o.error['type']}: {o.error['message']}"
            continue
        for c in o.checks:
            flag = "PASS" if c.passed else "FAIL"
            yield (f"{flag}  {o.name} [{c.check}] lhs={c.lhs:.12g} abs={c.abs_residual:.3e} "
                   f"rel={c.rel_residual:.3e} spread={c.form_spread:.3e} tol={c.tol:g}")


def cmd_run(args):
    overrides = Overrides(args.quad_order, args.fd_step, args.tol)
    try:
        scenarios = [build(load(p), overrides) for p in collect_configs(args.path)]
    except ConfigParse as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    jobs = max(1, args.jobs)
    if jobs == 1 or len(scenarios) == 1:
        outcomes = [execute(s) for s in scenarios]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(execute, scenarios))
    report = build_report(outcomes)
    out = Path(args.out or os.environ.get("SURFCALC_OUT") or DEFAULT_OUT)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        write_series(outcomes, out / "series.csv")
    except OSError as exc:
        print(f"cannot write reports: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in _summary_lines(outcomes):
            print(line)
        s = report["summary"]
        print(f"{s['passed']}/{s['checks']} checks passed, {s['errors']} errors; "
              f"report written to {out / 'report.json'}")
    return _exit_code(outcomes)


def catalog():
    """Everything a scenario file can name, with parameter defaults."""
    def table(t):
        return {k: dict(v[1]) for k, v in sorted(t.items())}
    sims = {k: {"left": vars(v["left"]), "right": vars(v["right"]),
                **{kk: vv for kk, vv in v.items() if kk not in ("left", "right")}}
            for k, v in sorted(SIMULATIONS.items())}
    return _plain({
        "charts": table(geometry.CHARTS),
        "moving_charts": table(moving.MOVING_CHARTS),
        "scalar_fields": {**table(SCALAR_FIELDS), "surface_expr": {"expr": "u1", "extend": False}},
        "vector_fields": table(VECTOR_FIELDS),
        "flows": table(moving.FLOWS),
        "generalized_reynolds_scenarios": table(GR_SCENARIOS),
        "jump_cases": {**table(JUMP_CASES), "reduction": {}},
        "simulations_1d": sims,
        "scenario_kinds": list(KINDS),
    })


def list_catalog(as_json=False):
    cat = catalog()
    if as_json:
        return json.dumps(cat, indent=2, sort_keys=True)
    lines = []
    for section, entries in cat.items():
        lines.append(f"{section}:")
        if isinstance(entries, list):
            lines.extend(f"  {e}" for e in entries)
            continue
        for name, params in entries.items():
            sig = ", ".join(f"{k}={v}" for k, v in params.items())
            lines.append(f"  {name}({sig})")
    return "\n".join(lines)


def cmd_list(args):
    print(list_catalog(args.json))
    return EXIT_OK


def make_parser():
    parser = argparse.ArgumentParser(prog="surfcalc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"surfcalc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file or every .cfg file under a directory")
    run.add_argument("path")
    run.add_argument("--jobs", type=int, default=1, help="scenarios run in parallel")
    run.add_argument("--quad-order", type=int, help="override quad.order")
    run.add_argument("--fd-step", type=float, help="override fd.step")
    run.add_argument("--tol", type=float, help="override tol")
    run.add_argument("--json", action="store_true", help="print the report as JSON")
    run.add_argument("--out", help=f"output directory (default $SURFCALC_OUT or ./{DEFAULT_OUT})")
    run.set_defaults(func=cmd_run)
    lst = sub.add_parser("list", help="list catalog entries")
    lst.add_argument("--json", action="store_true")
    lst.set_defaults(func=cmd_list)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except SurfcalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
