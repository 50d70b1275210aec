"""Command-line front end.

Subcommands: roots, points, index, limit, verify. Exit codes: 0 success,
1 theorem violation or failed verification, 2 configuration error,
3 numerical failure. The --plot flags render PNG figures next to the
delimited output; VV_PRECISION overrides --precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import reporting
from .errors import (ConfigError, NumericalError, TheoremViolationError,
                     VvindexError)
from .fixed_points import (TrackControls, _is_regular_exact, enumerate_t0,
                           kernel_points_exact, make_schedule, track_set)
from .index_engine import (IndexTask, OddInsertion, chebyshev_nodes,
                           fit_polynomial, hessian, rhs_sum, verlinde_su2)
from .lie_core import build_root_system, highest_weight_rep
from .limit_analysis import verify_vanishing_mechanism
from .precision import resolve_precision

DEFAULT_VERIFY_GRID = [("A", 1, 2, 1), ("A", 1, 2, 2), ("A", 1, 2, 3), ("A", 1, 2, 4),
                       ("A", 1, 3, 1), ("A", 1, 3, 2), ("A", 1, 3, 3), ("A", 1, 3, 4),
                       ("A", 2, 2, 4)]


def _parse_group(text: str):
    text = text.strip()
    if len(text) < 2 or not text[0].isalpha():
        raise ConfigError(f"cannot parse group {text!r}; expected e.g. A1, A2, B2")
    family = text[0].upper()
    try:
        rank = int(text[1:])
    except ValueError as exc:
        raise ConfigError(f"cannot parse rank in group {text!r}") from exc
    return family, rank


def _parse_int_vector(text: str, rank: int, what: str):
    try:
        vec = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{what} must be a comma list of integers") from exc
    if len(vec) != rank:
        raise ConfigError(f"{what} must have {rank} entries")
    return np.asarray(vec, dtype=np.int64)


def _controls(args) -> TrackControls:
    return TrackControls(
        newton_tol=args.newton_tol,
        x_min=args.x_min,
        min_step=args.min_step,
        precision=resolve_precision(args.precision),
    )


def _build_task(rsd, args) -> IndexTask:
    u = None
    if getattr(args, "u_weight", None):
        u = highest_weight_rep(rsd, _parse_int_vector(args.u_weight, rsd.rank, "--u-weight"))
    v = None
    if getattr(args, "v_weight", None):
        v = highest_weight_rep(rsd, _parse_int_vector(args.v_weight, rsd.rank, "--v-weight"))
    flag_weight = None
    if getattr(args, "flag_weight", None) is not None:
        flag_weight = _parse_int_vector(args.flag_weight, rsd.rank, "--flag-weight")
    odd = ()
    intersection = None
    if getattr(args, "odd", None):
        try:
            spec = json.loads(args.odd)
            odd = tuple(OddInsertion(rep=highest_weight_rep(rsd, np.asarray(o["w"], dtype=np.int64)),
                                     cycle=str(o.get("cycle", i)))
                        for i, o in enumerate(spec["insertions"]))
            intersection = np.asarray(spec["intersection"], dtype=np.int64)
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"bad --odd specification: {exc}") from exc
    return IndexTask(rsd=rsd, g=args.g, h=args.h, u=u, v=v,
                     s_order=getattr(args, "s_order", 0), odd=odd,
                     intersection=intersection, flag_weight=flag_weight,
                     fiber_differentials=getattr(args, "fiber_diff", False))


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def cmd_roots(args) -> int:
    family, rank = _parse_group(args.group)
    rsd = build_root_system(family, rank)
    lines = [
        f"group={rsd.name}",
        f"rank={rsd.rank}",
        f"roots={rsd.n_roots}",
        f"positive_roots={rsd.n_positive}",
        f"c={rsd.dual_coxeter}",
        f"det_B={rsd.det_gram}",
        f"weyl_order={rsd.weyl_order}",
        f"dim_G={rsd.dim_group}",
        f"highest_root={','.join(str(int(x)) for x in rsd.highest_root)}",
    ]
    _emit(args, "\n".join(lines))
    return 0


def cmd_points(args) -> int:
    family, rank = _parse_group(args.group)
    rsd = build_root_system(family, rank)
    controls = _controls(args)
    if args.at == 0:
        fps = enumerate_t0(rsd, args.h, controls)
        doc = reporting.points_document(fps, at_t=0.0)
    else:
        if args.h < 1:
            raise ConfigError("points at t = -1 need h >= 1")
        ys = kernel_points_exact(rsd, args.h)
        pts = []
        for y in ys:
            regular = _is_regular_exact(rsd, y)
            branch = [int(args.h * sum(Fraction(int(rsd.gram[i, j])) * y[j]
                                       for j in range(rsd.rank))) for i in range(rsd.rank)]
            pts.append({"branch": branch, "y": [float(c) for c in y],
                        "regular": regular, "orbit": -1, "representative": False})
        doc = {
            "schema": reporting.SCHEMA_VERSION,
            "group": rsd.name, "h": args.h, "t": -1.0,
            "count": len(ys),
            "regular_count": sum(1 for p in pts if p["regular"]),
            "regular_orbits": None,
            "points": pts,
        }
    _emit(args, reporting.canonical_json(doc))
    return 0


def cmd_index(args) -> int:
    family, rank = _parse_group(args.group)
    rsd = build_root_system(family, rank)
    controls = _controls(args)
    task = _build_task(rsd, args)
    n_nodes = args.nodes if args.nodes else None
    result = fit_polynomial(task, n_nodes=n_nodes, t_min=args.t_min, controls=controls,
                            snap_tol=args.snap_tol)
    doc = reporting.index_result_document(result, task, args.t_min, len(result.nodes))
    _emit(args, reporting.canonical_json(doc))
    if args.csv:
        reporting.write_samples_csv(args.csv, result)
    if args.traces or args.plot:
        fps = enumerate_t0(rsd, task.h, controls)
        schedule = make_schedule(args.t_min, controls, extra_nodes=result.nodes)
        tracked = track_set(rsd, fps, schedule, controls)
        if args.traces:
            reporting.write_trace_csv(args.traces, tracked.representatives, rsd.rank)
    if args.plot:
        reporting.render_index_figure(args.plot, result)
    return 0


def cmd_limit(args) -> int:
    family, rank = _parse_group(args.group)
    rsd = build_root_system(family, rank)
    controls = _controls(args)
    task = IndexTask(rsd=rsd, g=args.g, h=args.h)
    fps = enumerate_t0(rsd, task.h, controls)
    t_min = -1.0 + controls.x_min**2
    schedule = make_schedule(t_min, controls)
    tracked = track_set(rsd, fps, schedule, controls)
    report = verify_vanishing_mechanism(task, controls, tracked=tracked)
    doc = reporting.limit_document(report, rsd.name, task.g, task.h)
    _emit(args, reporting.canonical_json(doc))
    if args.traces:
        reporting.write_trace_csv(args.traces, tracked.representatives, rsd.rank)
    if args.plot:
        reporting.render_limit_figure(args.plot, report)
    return 0


def _verify_cell(family, rank, g, h, controls, snap_tol) -> dict:
    rsd = build_root_system(family, rank)
    task = IndexTask(rsd=rsd, g=g, h=h)
    checks = {}

    fps = enumerate_t0(rsd, h, controls)
    t_min_limit = -1.0 + controls.x_min**2
    nodes = chebyshev_nodes(-0.9, 0.0, task.degree_bound() + 8)
    schedule = make_schedule(t_min_limit, controls, extra_nodes=nodes)
    tracked = track_set(rsd, fps, schedule, controls)

    # normalized Hessian determinant at every point of the t = 0 fibre
    dev = 0.0
    for p in fps.paths:
        hf = hessian(rsd, p.start, 0.0, h=h)
        dev = max(dev, abs(complex(hf.det_norm) - 1.0))
    checks["det_norm_dev"] = dev
    checks["det_norm_ok"] = dev <= 1e-12

    value0 = rhs_sum(rsd, task, tracked.paths, 0.0, controls)
    if rsd.name == "A1":
        oracle = verlinde_su2(g, h)
        rel = abs(complex(value0).real - oracle) / abs(oracle)
        checks["verlinde_rel_err"] = rel
        checks["verlinde_ok"] = rel <= 1e-9

    result = fit_polynomial(task, nodes=nodes, controls=controls,
                            snap_tol=snap_tol, tracked=tracked)
    int_dev = float(np.max(np.abs(result.polynomial[0] - np.round(result.polynomial[0].real))))
    checks["integer_dev"] = int_dev
    checks["integer_ok"] = int_dev <= 1e-6
    checks["vanishing_order"] = result.vanishing_order
    checks["vanishing_bound"] = (g - 1) * rsd.rank
    checks["vanishing_ok"] = result.vanishing_order >= (g - 1) * rsd.rank

    mech = verify_vanishing_mechanism(task, controls, tracked=tracked)
    checks["bounded_ok"] = mech.bounded
    checks["sum_slope"] = mech.slope

    checks["pass"] = all(v for k, v in checks.items() if k.endswith("_ok"))
    return checks


def cmd_verify(args) -> int:
    controls = _controls(args)
    if args.group:
        family, rank = _parse_group(args.group)
        if args.g is None or args.h is None:
            raise ConfigError("single-cell verify needs --group, --g and --h")
        grid = [(family, rank, args.g, args.h)]
    else:
        grid = DEFAULT_VERIFY_GRID
    cells = []
    all_pass = True
    for family, rank, g, h in grid:
        checks = _verify_cell(family, rank, g, h, controls, args.snap_tol)
        cells.append({"group": f"{family}{rank}", "g": g, "h": h, **checks})
        all_pass &= checks["pass"]
        if not args.json:
            status = "PASS" if checks["pass"] else "FAIL"
            sys.stdout.write(f"{family}{rank} g={g} h={h}: {status} "
                             f"(order {checks['vanishing_order']} >= {checks['vanishing_bound']})\n")
    if args.json:
        _emit(args, reporting.canonical_json(
            {"schema": reporting.SCHEMA_VERSION, "pass": all_pass, "cells": cells}))
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vvindex",
        description="Twisted Verlinde-type index evaluation and vanishing checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_g=True, need_h=True):
        p.add_argument("--group", required=True, help="group, e.g. A1, A2, B2, G2")
        if need_g:
            p.add_argument("--g", type=int, required=True, help="genus (>= 2)")
        if need_h:
            p.add_argument("--h", type=int, required=True, help="level (>= 0)")
        numeric(p)

    def numeric(p):
        p.add_argument("--precision", choices=["double", "extended"], default=None)
        p.add_argument("--newton-tol", type=float, default=1e-12)
        p.add_argument("--x-min", type=float, default=1e-3)
        p.add_argument("--min-step", type=float, default=1e-11)
        p.add_argument("--snap-tol", type=float, default=1e-6)
        p.add_argument("--out", default=None, help="write the report to this path")

    p = sub.add_parser("roots", help="print root-system summary data")
    p.add_argument("--group", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("points", help="enumerate fixed points at t=0 or t=-1")
    p.add_argument("--group", required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--at", type=int, choices=[0, -1], default=0)
    numeric(p)
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("index", help="sample and fit the index polynomial")
    common(p)
    p.add_argument("--t-min", type=float, default=-0.9)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--s-order", type=int, default=0)
    p.add_argument("--u-weight", default=None, help="highest weight of U, comma ints")
    p.add_argument("--v-weight", default=None, help="highest weight of V, comma ints")
    p.add_argument("--flag-weight", default=None, help="Borel weight mu, comma ints")
    p.add_argument("--fiber-diff", action="store_true")
    p.add_argument("--odd", default=None,
                   help='JSON: {"insertions":[{"w":[...],"cycle":"a"},...],"intersection":[[...]]}')
    p.add_argument("--csv", default=None, help="write (t, value) samples CSV here")
    p.add_argument("--traces", default=None, help="write path trace CSV here")
    p.add_argument("--plot", default=None, help="render a PNG figure here")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("limit", help="t -> -1 analysis of the tracked paths")
    common(p)
    p.add_argument("--traces", default=None)
    p.add_argument("--plot", default=None)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("verify", help="run the acceptance grid")
    p.add_argument("--group", default=None)
    p.add_argument("--g", type=int, default=None)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--json", action="store_true", help="machine-readable verdict")
    numeric(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return 2
    except TheoremViolationError as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return 1
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3
    except VvindexError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
