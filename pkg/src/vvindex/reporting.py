"""Serialization of results: canonical JSON, delimited traces, figures.

JSON output is byte-stable for a fixed configuration and precision mode:
keys are emitted in construction order, floats are formatted with %.17g, and
reductions upstream run in sorted branch order. CSV schemas:

* path traces: branch_n0.., t, x, re_xi_0.., im_xi_0.., residual, min_root_gap
* index samples: t, x, value_s{k}_re, value_s{k}_im for each jet order k

Figures are rendered with the Agg backend next to the delimited output.
"""

from __future__ import annotations

import io
import json

import numpy as np

SCHEMA_VERSION = 1


def _fmt_float(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    xf = float(x)
    if xf != xf:
        return '"nan"'
    if xf in (float("inf"), float("-inf")):
        return f'"{xf}"'
    if xf == int(xf) and abs(xf) < 1e15:
        return f"{int(xf)}.0"
    return format(xf, ".17g")


def canonical_json(obj) -> str:
    """Serialize with deterministic float formatting and key order."""
    buf = io.StringIO()

    def emit(o):
        if isinstance(o, dict):
            buf.write("{")
            for i, (k, v) in enumerate(o.items()):
                if i:
                    buf.write(",")
                buf.write(json.dumps(str(k)))
                buf.write(":")
                emit(v)
            buf.write("}")
        elif isinstance(o, (list, tuple, np.ndarray)):
            buf.write("[")
            for i, v in enumerate(np.asarray(o).tolist() if isinstance(o, np.ndarray) else o):
                if i:
                    buf.write(",")
                emit(v)
            buf.write("]")
        elif isinstance(o, (bool, np.bool_)):
            buf.write("true" if o else "false")
        elif o is None:
            buf.write("null")
        elif isinstance(o, (int, np.integer)):
            buf.write(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            buf.write(_fmt_float(o))
        elif isinstance(o, (complex, np.complexfloating)):
            emit({"re": float(o.real), "im": float(o.imag)})
        else:
            buf.write(json.dumps(str(o)))

    emit(obj)
    return buf.getvalue()


def index_result_document(result, task, t_min, n_nodes) -> dict:
    doc = {
        "schema": SCHEMA_VERSION,
        "task": {
            "group": result.group,
            "g": result.g,
            "h": result.h,
            "s_order": task.s_order,
            "flag_weight": None if task.flag_weight is None
            else [int(x) for x in np.asarray(task.flag_weight)],
            "fiber_differentials": bool(task.fiber_differentials),
            "odd_insertions": len(task.odd),
            "t_min": float(t_min),
            "nodes": int(n_nodes),
            "degree_bound": int(result.degree),
        },
        "nodes": [
            {"t": float(t), "value_re": float(v.real), "value_im": float(v.imag)}
            for t, v in zip(result.nodes, result.values[:, 0])
        ],
        "polynomial": [[_coeff_pair(c) for c in row] for row in result.polynomial],
        "snapped": bool(result.snapped),
        "residual": float(result.residual),
        "vanishing_order": int(result.vanishing_order),
        "verlinde_t0": float(result.value_t0.real),
        "per_point": [
            {"branch": list(map(int, branch)),
             "theta_re": float(th.real), "theta_im": float(th.imag)}
            for branch, th in result.per_point
        ],
    }
    return doc


def _coeff_pair(c):
    c = complex(c)
    return {"re": c.real, "im": c.imag}


def points_document(fps, at_t: float) -> dict:
    paths = sorted(fps.paths, key=lambda p: p.branch)
    return {
        "schema": SCHEMA_VERSION,
        "group": fps.group,
        "h": fps.h,
        "t": float(at_t),
        "count": fps.count,
        "regular_count": len(fps.regular_paths),
        "regular_orbits": fps.regular_orbit_count,
        "points": [
            {
                "branch": list(map(int, p.branch)),
                "y": [float(v) for v in np.imag(p.samples[0].xi) / (2.0 * np.pi)],
                "regular": bool(p.regular_t0),
                "orbit": int(p.orbit_id),
                "representative": bool(p.is_representative),
            }
            for p in paths
        ],
    }


def limit_document(report, group: str, g: int, h: int) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "group": group,
        "g": g,
        "h": h,
        "bounded": bool(report.bounded),
        "sum_slope": float(report.slope),
        "paths": [
            {
                "branch": list(map(int, row["branch"])),
                "limit_point": [float(v) for v in row["limit_point"]],
                "z_roots": [list(map(int, b)) for b in row["z_roots"]],
                "kind": row["kind"],
                "xi1": None if row["xi1"] is None else
                [{"re": c.real, "im": c.imag} for c in row["xi1"]],
                "xi1_residual": float(row["xi1_residual"]),
                "theta_limit_re": float(row["theta_limit"].real),
                "theta_limit_im": float(row["theta_limit"].imag),
                "extrapolation_error": float(row["extrapolation_error"]),
            }
            for row in report.rows
        ],
    }


def write_trace_csv(path, tracked_paths, rank: int) -> None:
    cols = ([f"branch_n{i}" for i in range(rank)] + ["t", "x"]
            + [f"re_xi_{i}" for i in range(rank)]
            + [f"im_xi_{i}" for i in range(rank)]
            + ["residual", "min_root_gap"])
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for p in sorted(tracked_paths, key=lambda q: q.branch):
            for s in p.samples:
                xi = np.asarray(s.xi, dtype=np.complex128)
                row = ([str(int(n)) for n in p.branch]
                       + [format(s.t, ".17g"), format(s.x, ".17g")]
                       + [format(v, ".17g") for v in xi.real]
                       + [format(v, ".17g") for v in xi.imag]
                       + [format(s.residual, ".17g"), format(s.min_root_gap, ".17g")])
                fh.write(",".join(row) + "\n")


def write_samples_csv(path, result) -> None:
    orders = result.values.shape[1]
    cols = ["t", "x"]
    for k in range(orders):
        cols += [f"value_s{k}_re", f"value_s{k}_im"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for t, row in zip(result.nodes, result.values):
            x = float(np.sqrt(1.0 + t))
            cells = [format(float(t), ".17g"), format(x, ".17g")]
            for k in range(orders):
                cells += [format(row[k].real, ".17g"), format(row[k].imag, ".17g")]
            fh.write(",".join(cells) + "\n")


def _agg_pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_index_figure(path, result) -> None:
    """Samples, fitted polynomial and the vanishing prefactor on one canvas."""
    plt = _agg_pyplot()
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True,
                                   gridspec_kw={"height_ratios": [3, 1]})
    ts = np.asarray(result.nodes, dtype=float)
    vals = result.values[:, 0].real
    grid = np.linspace(min(ts), max(ts), 400)
    coeffs = result.polynomial[0].real
    fit = np.polynomial.polynomial.polyval(grid, coeffs)
    ax1.plot(grid, fit, "-", lw=1.2, label=f"degree {result.degree} fit")
    ax1.plot(ts, vals, "o", ms=4, label="samples")
    ax1.set_ylabel("index value")
    ax1.set_title(f"{result.group}  g={result.g}  h={result.h}  "
                  f"(vanishing order {result.vanishing_order} at t=-1)")
    ax1.legend(frameon=False)
    resid = vals - np.polynomial.polynomial.polyval(ts, coeffs)
    ax2.axhline(0.0, color="0.6", lw=0.8)
    ax2.plot(ts, resid, "s", ms=3)
    ax2.set_xlabel("t")
    ax2.set_ylabel("fit residual")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_limit_figure(path, report) -> None:
    """Orbit sum magnitude against x on log-log axes."""
    plt = _agg_pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    ax.loglog(report.xs, np.abs(report.sums), "o-", ms=3.5, lw=1.0)
    ax.set_xlabel("x = sqrt(1+t)")
    ax.set_ylabel("|sum of theta^(1-g) Tr_U|")
    ax.set_title(f"boundedness toward t = -1 (slope {report.slope:.3f})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
