"""Fixed points of the twisted torus equation and their continuation in t.

The tracked equation, in logarithmic form and fundamental-weight coordinates,
is

    LogChi(xi, t, s) = (h+c) * B @ xi + s * dTr_V(xi)
                       - sum_{alpha > 0} Log[(1 + t e^{alpha(xi)}) /
                                             (1 + t e^{-alpha(xi)})] * alpha
                     = 2*pi*i * n

with a constant integer branch vector n per path and the principal log per
positive-root factor (valid throughout: Re(1 + t e^alpha) > 0 on the compact
torus for -1 < t <= 0). The root-sum orientation is the one for which the
t -> -1 degeneration lands on the level-h lattice exp(h*b) = 1; the opposite
choice sends paths to a shifted lattice with no collisions at all.

At t = s = 0 solutions form the kernel of exp((h+c)*b), enumerated exactly
over rationals via the Smith form; Weyl orbits and regularity are decided in
exact arithmetic there.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (ConfigError, InternalError, NoConvergenceError,
                     PathFailureError, SingularEvaluationError)
from .jets import Jet, generic_solve, vexp, vlog
from .lattice import quotient_representatives
from .lie_core import (Representation, RootSystemData, TorusPoint,
                       character_jets, dominant_weights_at_level,
                       torus_point_from_y)
from .precision import DOUBLE, Precision

_TWO_PI = 2.0 * np.pi


class ConditionWarning(UserWarning):
    """Jacobian condition number degraded away from the t = -1 endpoint."""


@dataclass(frozen=True)
class TrackControls:
    """Step-size and tolerance knobs for the corrector and the scheduler."""

    newton_tol: float = 1e-12
    max_newton_iter: int = 30
    initial_step: float = 0.02
    min_step: float = 1e-11
    x_min: float = 1e-3
    x_ratio: float = 0.85
    path_sep: float = 1e-6
    regularity_tol: float = 1e-8
    continuity_bound: float = 0.25
    condition_threshold: float = 1e10
    precision: Precision = DOUBLE


def _sup(v):
    """Sup norm of a residual vector whose entries may be jets."""
    out = 0.0
    for x in np.asarray(v).ravel():
        if isinstance(x, Jet):
            out = max(out, float(np.max(np.abs(x.c))))
        else:
            out = max(out, abs(complex(x)))
    return out


def _solve_small(H, b):
    H = np.asarray(H)
    if H.dtype == np.complex128:
        return np.linalg.solve(H, np.asarray(b, dtype=np.complex128))
    x = generic_solve(H, b)
    if H.dtype != object and np.asarray(b).dtype != object:
        return np.asarray([v for v in x], dtype=H.dtype)
    return x


def _as_xi_array(xi, dtype=None):
    xi = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi)
    if xi.dtype == object:
        return xi
    if dtype is None:
        dtype = np.result_type(xi.dtype, np.complex128)
    return xi.astype(dtype)


def log_chi(rsd: RootSystemData, xi, t, s=0.0, h: int = 0,
            v: Representation | None = None, singular_eps: float = 1e-13):
    """Logarithmic form of the fixed-point map, a covector in weight coords.

    Reduces to (h+c) * B @ xi at t = s = 0. Raises SingularEvaluationError
    when a root factor's argument is within singular_eps of zero (only
    possible as t approaches -1).
    """
    xi = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi)
    m = h + rsd.dual_coxeter
    base = m * np.dot(rsd.gram, xi)
    if v is not None and not _is_zero_scalar(s):
        _, dtr, _ = character_jets(v, xi)
        base = _add_scaled(base, s, dtr)
    if _is_zero_scalar(t):
        return base
    a = np.dot(rsd.positive_roots, xi)
    up = 1.0 + t * vexp(a)
    dn = 1.0 + t * vexp(-a)
    lo = min(_sup_min(up), _sup_min(dn))
    if lo < singular_eps:
        raise SingularEvaluationError(
            f"root factor within {lo:.2e} of zero at t={_real(t):.6g}")
    term = vlog(up) - vlog(dn)
    return base - np.dot(term, rsd.positive_roots)


def _is_zero_scalar(x):
    if isinstance(x, Jet):
        return bool(np.all(x.c == 0))
    return x == 0


def _add_scaled(base, s, arr):
    """base + s * arr where s may be a Jet and arr an object array."""
    base = np.asarray(base)
    arr = np.asarray(arr)
    if isinstance(s, Jet) or base.dtype == object or arr.dtype == object:
        flat = [b + s * a for b, a in zip(base.ravel(), arr.ravel())]
        return np.asarray(flat, dtype=object).reshape(base.shape)
    return base + s * arr


def _real(t):
    return float(t.const.real) if isinstance(t, Jet) else float(np.real(t))


def _sup_min(v):
    out = np.inf
    for x in np.asarray(v).ravel():
        c = x.const if isinstance(x, Jet) else complex(x)
        out = min(out, abs(c))
    return out


def hessian_matrix(rsd: RootSystemData, xi, t, s=0.0, h: int = 0,
                   v: Representation | None = None):
    """Jacobian of log_chi with respect to xi; symmetric, (h+c)*B at t=s=0."""
    xi = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi)
    m = h + rsd.dual_coxeter
    if xi.dtype == object:
        H = np.empty((rsd.rank, rsd.rank), dtype=object)
        for j in range(rsd.rank):
            for k in range(rsd.rank):
                H[j, k] = m * rsd.gram[j, k] + 0.0j
    else:
        H = (m * rsd.gram).astype(xi.dtype)
    if v is not None and not _is_zero_scalar(s):
        _, _, hv = character_jets(v, xi)
        H = _add_scaled(H, s, hv)
    if _is_zero_scalar(t):
        return H
    z = vexp(np.dot(rsd.roots, xi))
    coef = [t * zi / (1.0 + t * zi) for zi in z] if np.asarray(z).dtype == object \
        else t * z / (1.0 + t * z)
    R = rsd.roots
    if np.asarray(z).dtype == object or np.asarray(H).dtype == object:
        H = np.asarray(H, dtype=object)
        for i in range(len(R)):
            ci = coef[i]
            for j in range(rsd.rank):
                for k in range(rsd.rank):
                    H[j, k] = H[j, k] - ci * (R[i, j] * R[i, k])
        return H
    return H - np.einsum("i,ij,ik->jk", coef, R.astype(H.dtype), R.astype(H.dtype))


def dlogchi_dt(rsd: RootSystemData, xi, t):
    """Partial derivative of log_chi in t at fixed xi (s = 0)."""
    xi = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi)
    a = rsd.positive_roots @ xi
    za = np.exp(a)
    zb = np.exp(-a)
    term = za / (1.0 + t * za) - zb / (1.0 + t * zb)
    return -(term @ rsd.positive_roots.astype(term.dtype))


def count_solutions(rsd: RootSystemData, h: int) -> int:
    """Kernel size of exp((h+c)*b): (h+c)^rank times det B."""
    if h < 0:
        raise ConfigError("level h must be nonnegative")
    m = h + rsd.dual_coxeter
    return m**rsd.rank * rsd.det_gram


def kernel_points_exact(rsd: RootSystemData, m: int):
    """Exact torus coordinates y (Fractions in [0,1)) with m * B @ y integral."""
    M = (m * rsd.gram).astype(np.int64)
    Binv = rsd.gram_inv_fractions
    out = []
    seen = set()
    for k in quotient_representatives(M):
        y = tuple((sum(Binv[i][j] * int(k[j]) for j in range(rsd.rank)) / m) % 1
                  for i in range(rsd.rank))
        if y in seen:
            raise InternalError("Smith-form enumeration produced a duplicate coset")
        seen.add(y)
        out.append(y)
    expected = m**rsd.rank * rsd.det_gram
    if len(out) != expected:
        raise InternalError(f"kernel enumeration found {len(out)} points, expected {expected}")
    return sorted(out)


def _branch_of(rsd, y, m):
    n = []
    for i in range(rsd.rank):
        val = m * sum(Fraction(int(rsd.gram[i, j])) * y[j] for j in range(rsd.rank))
        if val.denominator != 1:
            raise InternalError("branch vector came out non-integral")
        n.append(int(val))
    return tuple(n)


def _is_regular_exact(rsd, y):
    for alpha in rsd.positive_roots:
        val = sum(Fraction(int(a)) * b for a, b in zip(alpha, y))
        if val.denominator == 1:
            return False
    return True


def _weyl_orbit_exact(rsd, y):
    orbit = set()
    for W in rsd.weyl_vector_matrices:
        z = tuple((sum(Fraction(int(W[i, j])) * y[j] for j in range(rsd.rank))) % 1
                  for i in range(rsd.rank))
        orbit.add(z)
    return orbit


def _alcove_member_exact(rsd, orbit):
    """The closed-alcove representative of an exact affine Weyl orbit."""
    theta = rsd.highest_root
    for y in sorted(orbit):
        for shift_mask in range(1 << rsd.rank):
            z = tuple(y[i] + (1 if (shift_mask >> i) & 1 else 0) for i in range(rsd.rank))
            ok = all(sum(Fraction(int(rsd.cartan[i, j])) * z[j] for j in range(rsd.rank)) >= 0
                     for i in range(rsd.rank))
            if ok and sum(Fraction(int(theta[j])) * z[j] for j in range(rsd.rank)) <= 1:
                return z
    raise InternalError("affine orbit without closed-alcove member")


@dataclass(frozen=True)
class PathSample:
    t: float
    x: float
    xi: np.ndarray
    residual: float
    min_root_gap: float


@dataclass(frozen=True)
class FixedPointPath:
    """One tracked solution branch: start data plus the recorded samples."""

    start: TorusPoint
    branch: tuple
    samples: tuple = ()
    regular_t0: bool = True
    regular_final: bool = True
    orbit_id: int = -1
    is_representative: bool = False
    y_exact: tuple | None = None
    condition_flagged: bool = False

    @property
    def final(self) -> PathSample:
        return self.samples[-1]

    def sample_at(self, t: float, tol: float = 1e-10) -> PathSample:
        for s in self.samples:
            if abs(s.t - t) <= tol:
                return s
        raise ConfigError(f"path has no sample at t={t!r}")

    def xi_at(self, t: float, tol: float = 1e-10) -> np.ndarray:
        return self.sample_at(t, tol).xi


@dataclass(frozen=True)
class FixedPointSet:
    """All solutions at a given level, with orbit bookkeeping."""

    group: str
    h: int
    paths: tuple
    s_order: int = 0

    @property
    def count(self) -> int:
        return len(self.paths)

    @property
    def regular_paths(self):
        return tuple(p for p in self.paths if p.regular_t0)

    @property
    def representatives(self):
        return tuple(p for p in self.paths if p.is_representative)

    @property
    def regular_representatives(self):
        return tuple(p for p in self.paths if p.is_representative and p.regular_t0)

    @property
    def regular_orbit_count(self) -> int:
        return len({p.orbit_id for p in self.paths if p.regular_t0})


def _min_root_gap(rsd, xi):
    vals = np.exp(rsd.roots @ np.asarray([complex(vv) for vv in np.ravel(xi)]))
    return float(np.min(np.abs(vals - 1.0)))


def _sample(rsd, t, xi, residual):
    xi_native = np.asarray(xi)
    if xi_native.dtype == object:
        xi_native = np.asarray([complex(getattr(v, "const", v)) for v in xi_native])
    xi_native = xi_native.copy()
    xi_native.setflags(write=False)
    return PathSample(t=float(t), x=float(np.sqrt(max(1.0 + t, 0.0))), xi=xi_native,
                      residual=float(residual), min_root_gap=_min_root_gap(rsd, xi_native))


def enumerate_t0(rsd: RootSystemData, h: int, controls: TrackControls = TrackControls()) -> FixedPointSet:
    """All solutions at t = s = 0, grouped into Weyl orbits, exactly.

    Regular orbit representatives carry strictly dominant branch vectors, in
    bijection with the level-h dominant weights shifted by the Weyl vector.
    """
    if h < 0:
        raise ConfigError("level h must be nonnegative")
    m = h + rsd.dual_coxeter
    ys = kernel_points_exact(rsd, m)
    index_of = {y: i for i, y in enumerate(ys)}

    orbit_id_of = {}
    orbit_members = []
    for y in ys:
        if index_of[y] in orbit_id_of:
            continue
        orbit = _weyl_orbit_exact(rsd, y)
        members = sorted(index_of[z] for z in orbit if z in index_of)
        if set(members) != {index_of[z] for z in orbit}:
            raise InternalError("Weyl orbit left the solution set")
        oid = len(orbit_members)
        orbit_members.append(members)
        for i in members:
            orbit_id_of[i] = oid

    paths = []
    n_regular_orbits = 0
    for oid, members in enumerate(orbit_members):
        regular = _is_regular_exact(rsd, ys[members[0]])
        if regular:
            n_regular_orbits += 1
            theta_ck = rsd.highest_coroot_coords()
            rep_idx = None
            for i in members:
                n = _branch_of(rsd, ys[i], m)
                level = sum(Fraction(c) * tc for c, tc in zip(n, theta_ck))
                if all(c >= 1 for c in n) and level < m:
                    if rep_idx is not None:
                        raise InternalError("two open-alcove members in one regular orbit")
                    rep_idx = i
            if rep_idx is None:
                raise InternalError("regular orbit without open-alcove branch")
        else:
            alcove_y = _alcove_member_exact(rsd, {ys[i] for i in members})
            canon = tuple(c % 1 for c in alcove_y)
            rep_idx = index_of[canon]
        for i in members:
            y = ys[i]
            n = _branch_of(rsd, y, m)
            xi = torus_point_from_y([float(c) for c in y],
                                    dtype=controls.precision.complex_dtype)
            res = _sup(log_chi(rsd, xi, 0.0, h=h)
                       - _TWO_PI * 1j * np.asarray(n, dtype=np.float64))
            paths.append(FixedPointPath(
                start=xi, branch=n,
                samples=(_sample(rsd, 0.0, xi.xi, res),),
                regular_t0=regular, regular_final=regular,
                orbit_id=oid, is_representative=(i == rep_idx), y_exact=y))

    expected = count_solutions(rsd, h)
    if len(paths) != expected:
        raise InternalError(f"enumerated {len(paths)} points, count formula says {expected}")
    n_weights = len(dominant_weights_at_level(rsd, h))
    if n_regular_orbits != n_weights:
        raise InternalError(
            f"regular orbit count {n_regular_orbits} != level-{h} dominant weight count {n_weights}")
    return FixedPointSet(group=rsd.name, h=h, paths=tuple(paths))


def newton_correct(rsd: RootSystemData, h: int, xi_guess, t, branch, tol: float = 1e-12,
                   max_iter: int = 30, s=0.0, v: Representation | None = None,
                   return_info: bool = False):
    """Newton corrector for log_chi(xi) = 2*pi*i*branch at fixed t (and jet s).

    Accepts jet-valued xi and s; the linear solves then run in jet arithmetic,
    which realizes the order-by-order solution of the s-perturbed equation.

    Near t = -1 on singular branches the log factors amplify rounding noise
    by the same factor that inflates the Jacobian, so the acceptance test
    uses tol plus a noise floor proportional to the Jacobian magnitude; the
    position error stays at machine precision either way.
    """
    xi = _as_xi_array(xi_guess)
    target = _TWO_PI * 1j * np.asarray(branch, dtype=np.float64)
    history = []
    tol_eff = tol
    for _ in range(max_iter):
        res = log_chi(rsd, xi, t, s=s, h=h, v=v) - target
        rnorm = _sup(res)
        history.append(rnorm)
        if rnorm <= tol_eff:
            point = TorusPoint(xi)
            if return_info:
                return point, {"iterations": len(history) - 1, "residuals": history,
                               "tol_effective": tol_eff}
            return point
        H = hessian_matrix(rsd, xi, t, s=s, h=h, v=v)
        hnorm = max(abs(e.const) if isinstance(e, Jet) else abs(complex(e))
                    for e in np.asarray(H).ravel())
        tol_eff = max(tol, 64.0 * np.finfo(np.float64).eps * hnorm)
        delta = _solve_small(H, -np.asarray(res))
        xi = xi + delta
    raise NoConvergenceError(
        f"Newton corrector did not reach tol={tol_eff} in {max_iter} iterations "
        f"(last residual {history[-1]:.3e})")


def make_schedule(t_end: float, controls: TrackControls = TrackControls(),
                  extra_nodes=()) -> tuple:
    """Decreasing t values from 0 to t_end, geometric in x = sqrt(1+t) near -1."""
    if not (-1.0 < t_end <= 0.0):
        raise ConfigError("schedule endpoint must lie in (-1, 0]")
    pts = {0.0, t_end}
    t = 0.0
    while t - controls.initial_step > max(t_end, -0.5):
        t -= controls.initial_step
        pts.add(round(t, 12))
    if t_end < -0.5:
        x = float(np.sqrt(0.5))
        x_end = float(np.sqrt(1.0 + t_end))
        while x * controls.x_ratio > x_end:
            x *= controls.x_ratio
            pts.add(-1.0 + x * x)
    for node in extra_nodes:
        if not (-1.0 < node <= 0.0):
            raise ConfigError(f"schedule node {node} outside (-1, 0]")
        if node >= t_end:
            pts.add(float(node))
    return tuple(sorted(pts, reverse=True))


def track_path(rsd: RootSystemData, h: int, start: TorusPoint, branch, t_schedule,
               controls: TrackControls = TrackControls()) -> FixedPointPath:
    """Continue one solution along a decreasing t schedule (s = 0).

    Predictor: Euler step along the implicit tangent H dxi/dt = -d(log_chi)/dt.
    Corrector: Newton with step halving; failure below min_step raises
    PathFailureError carrying the last good point.
    """
    t_schedule = tuple(t_schedule)
    if len(t_schedule) == 0 or abs(t_schedule[0]) > 1e-12:
        raise ConfigError("schedule must start at t = 0")
    if any(b - a <= 0 for a, b in zip(t_schedule[1:], t_schedule)):
        raise ConfigError("schedule must be strictly decreasing")

    dtype = controls.precision.complex_dtype
    xi = _as_xi_array(start, dtype)
    branch = tuple(int(b) for b in branch)
    target = _TWO_PI * 1j * np.asarray(branch, dtype=np.float64)
    res0 = _sup(log_chi(rsd, xi, t_schedule[0], h=h) - target)
    if res0 > 1e3 * controls.newton_tol:
        raise ConfigError(f"start point does not solve its branch equation (residual {res0:.2e})")

    samples = [_sample(rsd, t_schedule[0], xi, res0)]
    t_cur = t_schedule[0]
    flagged = False
    t_min = t_schedule[-1]

    for t_target in t_schedule[1:]:
        pending = [t_target]
        while pending:
            t_next = pending[-1]
            dt = t_next - t_cur
            if abs(dt) < controls.min_step:
                raise PathFailureError(
                    f"step underflow below {controls.min_step} at t={t_cur:.12g}",
                    last_t=t_cur, last_point=TorusPoint(xi))
            H = hessian_matrix(rsd, xi, t_cur, h=h)
            rhs = -dlogchi_dt(rsd, xi, t_cur).astype(np.asarray(H).dtype)
            tangent = _solve_small(H, rhs)
            guess = xi + dt * tangent
            try:
                corrected = newton_correct(rsd, h, guess, t_next, branch,
                                           tol=controls.newton_tol,
                                           max_iter=controls.max_newton_iter)
                y_old = np.imag(np.asarray(xi, dtype=np.complex128)) / _TWO_PI
                y_new = corrected.y
                jump = np.max(np.abs((y_new - y_old) - np.round(y_new - y_old)))
                if jump > controls.continuity_bound:
                    raise NoConvergenceError(f"corrector jumped by {jump:.3g} in torus distance")
            except (NoConvergenceError, SingularEvaluationError):
                pending.append(0.5 * (t_cur + t_next))
                continue
            xi = _as_xi_array(corrected, dtype)
            t_cur = t_next
            pending.pop()
            res = _sup(log_chi(rsd, xi, t_cur, h=h) - target)
            samples.append(_sample(rsd, t_cur, xi, res))
            Hc = np.asarray(hessian_matrix(rsd, xi, t_cur, h=h), dtype=np.complex128)
            cond = np.linalg.cond(Hc)
            if cond > controls.condition_threshold and t_cur > t_min + 0.05:
                flagged = True
                warnings.warn(
                    f"Jacobian condition {cond:.2e} at t={t_cur:.4g} (expected only near "
                    f"t=-1; check that h > c)", ConditionWarning, stacklevel=2)

    final_gap = samples[-1].min_root_gap
    return FixedPointPath(
        start=TorusPoint(np.asarray(samples[0].xi)), branch=branch, samples=tuple(samples),
        regular_t0=samples[0].min_root_gap > controls.regularity_tol,
        regular_final=final_gap > controls.regularity_tol,
        condition_flagged=flagged)


def track_set(rsd: RootSystemData, fps: FixedPointSet, t_schedule,
              controls: TrackControls = TrackControls(),
              representatives_only: bool = True) -> FixedPointSet:
    """Track the paths of a t = 0 enumeration along a schedule.

    Tracks Weyl-orbit representatives by default (the sums downstream only
    need those); tracking everything enables the separation and conservation
    checks.
    """
    out = []
    for p in fps.paths:
        if representatives_only and not p.is_representative:
            out.append(p)
            continue
        tracked = track_path(rsd, fps.h, p.start, p.branch, t_schedule, controls)
        out.append(FixedPointPath(
            start=p.start, branch=p.branch, samples=tracked.samples,
            regular_t0=p.regular_t0, regular_final=tracked.regular_final,
            orbit_id=p.orbit_id, is_representative=p.is_representative,
            y_exact=p.y_exact, condition_flagged=tracked.condition_flagged))
    return FixedPointSet(group=fps.group, h=fps.h, paths=tuple(out), s_order=fps.s_order)


def min_pairwise_separation(paths, t: float) -> float:
    """Smallest wrap distance between any two tracked paths at a sampled t."""
    ys = []
    for p in paths:
        try:
            s = p.sample_at(t)
        except ConfigError:
            continue
        ys.append(np.imag(s.xi) / _TWO_PI)
    if len(ys) < 2:
        return np.inf
    ys = np.asarray(ys)
    best = np.inf
    for i in range(len(ys)):
        d = ys[i + 1:] - ys[i]
        d = d - np.round(d)
        if len(d):
            best = min(best, float(np.min(np.max(np.abs(d), axis=1))))
    return best
