"""Command-line front end.

Exit codes: 0 success, 1 tool or input failure, 2 campaign found violations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict
from typing import Any, Sequence

import numpy as np

from . import harness
from .errors import NLocalError
from .measures import VMAX_MODES
from .network import analyze, network_from_descriptor
from .optimizer import maximize_linear, maximize_star
from .qstate import FAMILIES, RANDOM_KINDS, OPTIONAL_PARAMS, FAMILY_PARAMS

EXIT_OK, EXIT_FAIL, EXIT_VIOLATIONS = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


def _fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return harness.fmt(x)
    return str(x)


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NLOCAL_SEED")
    if env is None or env == "":
        return 0
    try:
        value = int(env)
    except ValueError:
        raise NLocalError(f"NLOCAL_SEED must be an integer, got {env!r}") from None
    if not 0 <= value < 2**64:
        raise NLocalError(f"NLOCAL_SEED must be a 64-bit unsigned integer, got {value}")
    return value


def _seed_arg(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _load_network(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            desc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise NLocalError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise NLocalError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return network_from_descriptor(desc)
    except NLocalError as exc:
        raise NLocalError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# Subcommands


def cmd_analyze(args) -> int:
    net = _load_network(args.network)
    if args.topology:
        net = net.with_topology(args.topology)
    report = analyze(net, args.vmax_mode).to_dict()
    if args.format == "csv":
        flat = []
        for k, v in report.items():
            if isinstance(v, list) and v and isinstance(v[0], dict):
                for i, entry in enumerate(v):
                    flat.append((f"{k}[{i}]", json.dumps(entry, default=_json_default)))
            elif isinstance(v, (list, dict)):
                flat.append((k, json.dumps(v, default=_json_default)))
            else:
                flat.append((k, v))
        _emit(_csv(["field", "value"], flat), args.out)
    else:
        _emit(_json(report), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.family != "werner":
        raise NLocalError(f"only the 'werner' family is supported for sweeps, got {args.family!r}")
    grid = list(harness.parse_grid(args.v_grid))
    grid = sorted(set(grid) | set(args.v_extra or []))
    rows = harness.werner_sweep(args.n, grid, args.vmax_mode)
    if args.format == "csv":
        header = ["n", "V", "B_linear", "B_star", "D", "D_printed"]
        _emit(_csv(header, [(r.n, r.V, r.B_linear, r.B_star, r.D, r.D_printed) for r in rows]), args.out)
    else:
        _emit(_json({"family": "werner", "vmax_mode": args.vmax_mode, "rows": [asdict(r) for r in rows]}), args.out)
    return EXIT_OK


def cmd_regions(args) -> int:
    axis, grid = harness.region_scan(args.topology, args.n, args.resolution)
    idx = np.argwhere(np.ones_like(grid, dtype=bool))
    if args.format == "csv":
        header = [f"C{i + 1}" for i in range(args.n)] + ["product", "violation_certified"]
        rows = ((*axis[i], float(np.prod(axis[i])), bool(grid[tuple(i)])) for i in idx)
        _emit(_csv(header, rows), args.out)
    else:
        _emit(
            _json(
                {
                    "topology": args.topology,
                    "n": args.n,
                    "threshold": harness.bounds.threshold_product(args.topology, args.n),
                    "axis": axis,
                    "certified_fraction": float(grid.mean()),
                    "cells": grid.astype(int),
                }
            ),
            args.out,
        )
    return EXIT_OK


def cmd_frontier(args) -> int:
    curves = harness.frontier_scan(args.n, args.resolution)
    if args.format == "csv":
        rows = ((name, e1, e2) for name, pts in curves.items() for e1, e2 in pts)
        _emit(_csv(["curve", "e1", "e2"], rows), args.out)
    else:
        _emit(_json({name: pts for name, pts in curves.items()}), args.out)
    return EXIT_OK


def cmd_campaign(args) -> int:
    fixed = _load_network(args.network).sources if args.network else None
    report = harness.run_campaign(
        args.claim,
        args.n,
        args.trials,
        ensemble=args.ensemble,
        seed=_seed(args),
        forced_separable=args.forced_separable,
        fixed_states=fixed,
        workers=args.workers,
    )
    _emit(report.to_csv() if args.format == "csv" else _json(report.to_dict()), args.out)
    if report.violations:
        print(
            f"{len(report.violations)} of {report.trials} trials violate {report.claim} "
            f"(min margin {report.min_margin:.6g})",
            file=sys.stderr,
        )
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_optimize(args) -> int:
    net = _load_network(args.network)
    if args.topology:
        net = net.with_topology(args.topology)
    if net.topology == "linear":
        res = maximize_linear(net, starts=args.starts, seed=_seed(args), max_sweeps=args.max_sweeps)
    else:
        res = maximize_star(net, starts=args.starts, seed=_seed(args), max_sweeps=args.max_sweeps, central=args.central)
    report = analyze(net, args.vmax_mode)
    payload = {"topology": net.topology, "n": net.n, "closed_form_B": report.B, **res.to_dict()}
    if args.format == "csv":
        _emit(_csv(["field", "value"], [(k, v) for k, v in payload.items() if not isinstance(v, (list, dict))]), args.out)
    else:
        _emit(_json(payload), args.out)
    return EXIT_OK


def cmd_families(args) -> int:
    fams = [
        {
            "family": tag,
            "parameters": list(FAMILY_PARAMS[tag]),
            "optional": sorted(OPTIONAL_PARAMS.get(tag, ())),
            "description": (FAMILIES[tag].__doc__ or "").strip().splitlines()[0] if FAMILIES[tag].__doc__ else "",
        }
        for tag in FAMILIES
    ]
    if args.format == "csv":
        _emit(_csv(["family", "parameters", "optional"], ((f["family"], " ".join(f["parameters"]), " ".join(f["optional"])) for f in fams)), args.out)
    else:
        _emit(_json({"families": fams, "random_kinds": list(RANDOM_KINDS)}), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed_arg, default=None, help="master seed (fallback: $NLOCAL_SEED, then 0)")
    common.add_argument("--vmax-mode", choices=sorted(VMAX_MODES), default="printed", help="normalization of M: 0.414 or sqrt(2)-1")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="nlocal", description="Maximal n-local violations of two-qubit chain and star networks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="closed-form B, bounds and measures for a network file")
    a.add_argument("network", help="JSON network descriptor")
    a.add_argument("--topology", choices=("linear", "star"), help="override the file's topology")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", parents=[common], help="D_n against the Werner visibility product")
    s.add_argument("--family", default="werner")
    s.add_argument("--n", type=int, nargs="+", default=[4])
    s.add_argument("--v-grid", default="0:1:0.001", help="start:stop:step")
    s.add_argument("--v-extra", type=float, nargs="*", help="extra visibility products to include")
    s.set_defaults(func=cmd_sweep)

    r = sub.add_parser("regions", parents=[common], help="concurrence cells certified to violate")
    r.add_argument("--topology", choices=("linear", "star"), required=True)
    r.add_argument("--n", type=int, default=3)
    r.add_argument("--resolution", type=int, default=101)
    r.set_defaults(func=cmd_regions)

    f = sub.add_parser("frontier", parents=[common], help="violation frontiers in singular-value space")
    f.add_argument("--n", type=int, nargs="+", default=[3, 4, 5, 6])
    f.add_argument("--resolution", type=int, default=201)
    f.set_defaults(func=cmd_frontier)

    c = sub.add_parser("campaign", parents=[common], help="randomized test of a bound or conjecture")
    c.add_argument("--claim", choices=harness.CLAIMS, required=True)
    c.add_argument("--n", type=int, default=3)
    c.add_argument("--trials", type=int, default=1000)
    c.add_argument("--ensemble", choices=RANDOM_KINDS, default="mixed-ginibre")
    c.add_argument("--forced-separable", type=int, default=None, help="separable sources per trial")
    c.add_argument("--network", help="evaluate this fixed network instead of sampling")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_campaign)

    o = sub.add_parser("optimize", parents=[common], help="numerically maximize over measurement settings")
    o.add_argument("--network", required=True)
    o.add_argument("--topology", choices=("linear", "star"))
    o.add_argument("--starts", type=int, default=8)
    o.add_argument("--max-sweeps", type=int, default=500)
    o.add_argument("--central", choices=("free", "singular"), default="free")
    o.set_defaults(func=cmd_optimize)

    fam = sub.add_parser("families", parents=[common], help="list state families and random ensembles")
    fam.set_defaults(func=cmd_families)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NLocalError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
