"""Behaviour of the tracked solutions as t approaches -1.

At t = -1 the equation degenerates to exp(h*b) = 1, whose solutions form the
coarser level-h lattice. Paths regular at t = 0 either converge to a regular
point of that lattice or collide into its singular locus; colliding paths
admit an expansion f_t = f_{-1} * exp(sum_k x^k xi_k) in x = sqrt(1+t), whose
leading coefficient solves a critical-point problem in the centralizer of the
limit (for the roots beta with e^beta(f_{-1}) = 1):

    iota(xi_1) (h*b) = sum_beta beta / beta(xi_1).

On the compact torus the tangent is i times the real minimizer of
(h/2) b(z, z) - sum_beta log|beta(z)| over a Weyl chamber of the centralizer;
this module fits the expansion from path data, solves the critical-point
problem independently, and extrapolates theta^{1-g} to its finite limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (ConfigError, NumericalError, TheoremViolationError)
from .fixed_points import (FixedPointPath, TrackControls, count_solutions,
                           enumerate_t0, kernel_points_exact, make_schedule,
                           track_set)
from .index_engine import IndexTask, _sorted_regular_reps, _trace_u, theta_inverse
from .lie_core import RootSystemData, TorusPoint, torus_point_from_y

_TWO_PI = 2.0 * np.pi


def solve_at_minus1(rsd: RootSystemData, h: int):
    """Exact solutions of exp(h*b) = 1 as torus points (h >= 1)."""
    if h < 1:
        raise ConfigError("the degenerate equation needs h >= 1")
    ys = kernel_points_exact(rsd, h)
    return [torus_point_from_y([float(c) for c in y]) for y in ys]


def centralizer(rsd: RootSystemData, p: TorusPoint, tol: float = 1e-8):
    """Roots beta with e^beta(f) = 1 within tol; closed under negation."""
    xi = np.asarray([complex(v) for v in np.ravel(p.xi)])
    vals = np.exp(rsd.roots @ xi)
    out = tuple(tuple(int(x) for x in r) for r, v in zip(rsd.roots, vals)
                if abs(v - 1.0) <= tol)
    return out


@dataclass(frozen=True)
class SingularLimit:
    """Limit point of a path at t = -1 with its expansion data."""

    point: TorusPoint
    y_exact: tuple
    z_roots: tuple                # centralizer roots (all, +/- pairs)
    kind: str                     # "collision" or "regular"
    xi1: np.ndarray | None = None
    higher: tuple = ()            # xi_k for k = 2..K from the fit
    fit_residual: float = float("nan")


def xi1_solve(rsd: RootSystemData, h: int, z_roots, chamber_seed,
              tol: float = 1e-12, max_iter: int = 80) -> np.ndarray:
    """Real minimizer of (h/2) b(z,z) - sum_beta log|beta(z)| in a chamber.

    chamber_seed is any vector interior to the chosen Weyl chamber of the
    centralizer; damped Newton stays inside because the potential blows up on
    the walls. The complex path tangent is i times the returned vector.
    """
    if len(z_roots) == 0:
        raise ConfigError("not a singular limit: empty centralizer")
    Z = np.asarray(z_roots, dtype=np.float64)
    Bf = rsd.gram.astype(np.float64)
    zeta = np.asarray(chamber_seed, dtype=np.float64).copy()
    vals = Z @ zeta
    if np.any(np.abs(vals) < 1e-14):
        raise ConfigError("chamber seed lies on a wall of the centralizer")
    signs = np.sign(vals)

    for _ in range(max_iter):
        vals = Z @ zeta
        grad = h * (Bf @ zeta) - (1.0 / vals) @ Z
        if np.max(np.abs(grad)) <= tol:
            return zeta
        hess = h * Bf + np.einsum("i,ij,ik->jk", 1.0 / vals**2, Z, Z)
        step = np.linalg.solve(hess, -grad)
        lam = 1.0
        for _ in range(60):
            cand = zeta + lam * step
            if np.all(np.sign(Z @ cand) == signs):
                break
            lam *= 0.5
        else:
            raise NumericalError("could not keep the Newton iterate inside the chamber")
        zeta = zeta + lam * step
    raise NumericalError("critical-point iteration did not converge")


def _nearest_limit_exact(rsd: RootSystemData, h: int, y: np.ndarray):
    """Closest level-h lattice point in wrap distance, rejecting ambiguity."""
    cands = kernel_points_exact(rsd, h)
    dists = []
    for cy in cands:
        d = np.asarray([float(c) for c in cy]) - y
        d -= np.round(d)
        dists.append(float(np.max(np.abs(d))))
    order = np.argsort(dists)
    best, runner = order[0], (order[1] if len(order) > 1 else None)
    if dists[best] > 0.05:
        raise NumericalError(
            f"final path point is {dists[best]:.3g} away from every degenerate lattice "
            "point; track closer to t = -1 first")
    if runner is not None and dists[runner] < 4.0 * dists[best] + 1e-12 and dists[runner] < 0.05:
        raise NumericalError(
            f"ambiguous nearest limit point: candidates {cands[best]} (d={dists[best]:.2e}) "
            f"and {cands[runner]} (d={dists[runner]:.2e})")
    return cands[best], dists[best]


def fit_expansion(rsd: RootSystemData, h: int, path: FixedPointPath, K: int = 3,
                  x_window: float = 10.0, beta_tol: float = 1e-6) -> SingularLimit:
    """Fit xi_1..xi_K of the x-expansion from the tail of a tracked path.

    The path must reach small x with geometrically spaced samples. For a
    regular limit (empty centralizer) the expansion degenerates to a smooth
    Taylor series in t and the limit is reported as kind="regular".
    """
    if len(path.samples) < K + 3:
        raise ConfigError("path has too few samples for an expansion fit")
    x_final = path.samples[-1].x
    tail = [s for s in path.samples if s.x <= x_window * x_final]
    if len(tail) < K + 2:
        raise ConfigError("path was not tracked densely enough near t = -1")

    y_final = np.imag(path.samples[-1].xi) / _TWO_PI
    y_lim, _ = _nearest_limit_exact(rsd, h, y_final)
    y_lim_f = np.asarray([float(c) for c in y_lim])
    z_roots = tuple(tuple(int(a) for a in alpha) for alpha in rsd.roots
                    if sum(Fraction(int(a)) * c for a, c in zip(alpha, y_lim)).denominator == 1)
    limit_point = torus_point_from_y(y_lim_f)

    # displacement in the Lie algebra, lattice-reduced toward the limit
    xs = np.asarray([s.x for s in tail])
    deltas = []
    for s in tail:
        dy = np.imag(s.xi) / _TWO_PI - y_lim_f
        dy -= np.round(dy)
        deltas.append(np.real(s.xi) + 1j * _TWO_PI * dy)
    deltas = np.asarray(deltas)

    if len(z_roots) == 0:
        # smooth in t: fit even powers of x only
        design = np.vander(xs**2, N=max(2, (K + 1) // 2 + 1), increasing=True)[:, 1:]
        coef, *_ = np.linalg.lstsq(design, deltas, rcond=None)
        resid = float(np.max(np.abs(design @ coef - deltas)))
        return SingularLimit(point=limit_point, y_exact=y_lim, z_roots=(),
                             kind="regular", xi1=None, higher=tuple(coef),
                             fit_residual=resid)

    design = np.vander(xs, N=K + 1, increasing=True)[:, 1:]
    coef, *_ = np.linalg.lstsq(design, deltas, rcond=None)
    resid = float(np.max(np.abs(design @ coef - deltas)))
    xi1 = coef[0]
    for beta in z_roots:
        if abs(np.dot(beta, xi1)) <= beta_tol:
            raise NumericalError(
                f"degenerate tangent: beta(xi1) ~ 0 for centralizer root {beta}")
    return SingularLimit(point=limit_point, y_exact=y_lim, z_roots=z_roots,
                         kind="collision", xi1=xi1, higher=tuple(coef[1:]),
                         fit_residual=resid)


def _theta_power_series(rsd, task, path, tail):
    vals = []
    for s in tail:
        th = theta_inverse(rsd, s.xi, s.t, h=task.h) ** (task.g - 1)
        vals.append(th * _trace_u(task, s.xi))
    return np.asarray(vals, dtype=np.complex128)


@dataclass(frozen=True)
class LimitThetaReport:
    branch: tuple
    limit: complex
    extrapolation_error: float
    semi_analytic: complex | None
    kind: str


def limit_theta(rsd: RootSystemData, task: IndexTask, path: FixedPointPath,
                expansion: SingularLimit | None = None,
                divergence_bound: float = 1e6) -> LimitThetaReport:
    """Extrapolate theta^{1-g} along the x-grid and cross-check its limit.

    The cross-check uses the degenerate Hessian h*B - 2 sum_{beta>0 in z}
    beta x beta / beta(xi_1)^2 (all root factors tend to 1), with xi_1 taken
    from the fitted expansion. Divergence raises a theorem-violation error.
    """
    if expansion is None:
        expansion = fit_expansion(rsd, task.h, path)
    x_final = path.samples[-1].x
    tail = [s for s in path.samples if s.x <= 10.0 * x_final]
    xs = np.asarray([s.x for s in tail])
    vals = _theta_power_series(rsd, task, path, tail)
    if np.max(np.abs(vals)) > divergence_bound * max(1.0, np.abs(vals[0])):
        raise TheoremViolationError(
            f"theta^(1-g) grows without bound along path {path.branch}")
    deg = min(3, len(xs) - 2)
    coef = np.polynomial.polynomial.polyfit(xs, vals, deg)
    limit = complex(coef[0])
    fitted = np.polynomial.polynomial.polyval(xs, coef)
    err = float(np.max(np.abs(fitted - vals)) + abs(limit - vals[-1]) * 0.01)

    semi = None
    m = task.h + rsd.dual_coxeter
    ref = float(m) ** rsd.rank * rsd.det_gram
    Hlim = (task.h * rsd.gram).astype(np.complex128)
    if expansion.kind == "collision":
        pos_z = []
        seen = set()
        for b in expansion.z_roots:
            nb = tuple(-x for x in b)
            if b in seen or nb in seen:
                continue
            seen.add(b)
            seen.add(nb)
            pos_z.append(b)
        for beta in pos_z:
            bv = np.asarray(beta, dtype=np.float64)
            val = complex(bv @ expansion.xi1)
            Hlim = Hlim - 2.0 * np.outer(bv, bv) / (val * val)
    det_norm = np.linalg.det(Hlim) / ref
    tr_u = _trace_u(task, np.asarray(expansion.point.xi))
    semi = complex((count_solutions(rsd, task.h) * det_norm) ** (task.g - 1) * tr_u)
    return LimitThetaReport(branch=path.branch, limit=limit,
                            extrapolation_error=err, semi_analytic=semi,
                            kind=expansion.kind)


@dataclass(frozen=True)
class MechanismReport:
    """Per-path limit table plus the boundedness verdict of the full sum."""

    rows: tuple
    xs: np.ndarray
    sums: np.ndarray
    slope: float
    bounded: bool


def verify_vanishing_mechanism(task: IndexTask, controls: TrackControls = TrackControls(),
                               tracked=None, slope_tol: float = 0.05) -> MechanismReport:
    """Check that the orbit sum of theta^{1-g} Tr_U stays bounded as x -> 0.

    Boundedness means the measured vanishing of the index polynomial at
    t = -1 comes entirely from the explicit (1+t)^{(g-1) rank} prefactor.
    An unbounded trend raises TheoremViolationError.
    """
    rsd = task.rsd
    if task.h < 0:
        raise ConfigError("level must be nonnegative")
    if tracked is None:
        fps = enumerate_t0(rsd, task.h, controls)
        t_min = -1.0 + controls.x_min**2
        schedule = make_schedule(t_min, controls)
        tracked = track_set(rsd, fps, schedule, controls, representatives_only=True)
    reps = _sorted_regular_reps(tracked.paths)
    if not reps:
        raise ConfigError("no regular representative paths to analyze")

    x_final = min(p.samples[-1].x for p in reps)
    ts = [s.t for s in reps[0].samples if s.x <= 10.0 * x_final]
    sums = []
    for t in ts:
        acc = 0.0 + 0.0j
        for p in reps:
            s = p.sample_at(t)
            acc += theta_inverse(rsd, s.xi, t, h=task.h) ** (task.g - 1) \
                * _trace_u(task, s.xi)
        sums.append(acc)
    xs = np.asarray([float(np.sqrt(1.0 + t)) for t in ts])
    sums = np.asarray(sums)

    mags = np.abs(sums)
    slope = float(np.polyfit(np.log(xs), np.log(np.maximum(mags, 1e-300)), 1)[0])
    # growth toward x -> 0 shows up as a negative slope of log|S| against log x
    spread = float(np.max(mags) / max(np.min(mags), 1e-300))
    bounded = slope >= -slope_tol or spread < 1.0 + 1e-6
    if not bounded:
        raise TheoremViolationError(
            f"orbit sum grows like x^{slope:.3f} toward t = -1 "
            f"({rsd.name}, g={task.g}, h={task.h})")

    rows = []
    for p in reps:
        exp = fit_expansion(rsd, task.h, p)
        rep = limit_theta(rsd, task, p, expansion=exp)
        rows.append({
            "branch": p.branch,
            "limit_point": tuple(float(c) for c in exp.y_exact),
            "z_roots": exp.z_roots,
            "kind": exp.kind,
            "xi1": None if exp.xi1 is None else [complex(c) for c in exp.xi1],
            "xi1_residual": exp.fit_residual,
            "theta_limit": rep.limit,
            "extrapolation_error": rep.extrapolation_error,
        })
    return MechanismReport(rows=tuple(rows), xs=xs, sums=sums, slope=slope, bounded=True)
