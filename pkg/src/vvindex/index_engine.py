"""Localized evaluation of the twisted index and its polynomial in t.

Per fixed point f = exp(xi) the weight is

    theta(f)^{-1} = |F| * prod_{all roots} (1 + t e^alpha)/(1 - e^alpha)
                        * det H(f) / det((h+c) B),

and the right-hand side of the index formula sums theta^{1-g} * Tr_U over
Weyl-orbit representatives of the regular solutions, times the prefactor
(1+t)^{(g-1)*rank}. The total is a polynomial in t of degree at most
(g-1)*dim G even though each term is transcendental, so the polynomial is
reconstructed from samples at Chebyshev nodes by least squares, snapped to
integers when the inserted classes are honest representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import spence

from .errors import (ConfigError, FitFailureError, SingularEvaluationError,
                     TheoremViolationError)
from .gamma_calc import KPolynomial, vanishing_order_at_minus1
from .jets import Jet, generic_det, generic_solve, vexp
from .fixed_points import (FixedPointSet, TrackControls, count_solutions,
                           enumerate_t0, hessian_matrix, make_schedule,
                           newton_correct, track_set)
from .lie_core import Representation, RootSystemData, TorusPoint, character_jets, trivial_rep


def dilog(z):
    """Euler dilogarithm Li2(z) = sum z^k / k^2, complex arguments allowed."""
    return spence(1.0 - np.asarray(z, dtype=np.complex128))


@dataclass(frozen=True)
class OddInsertion:
    """A degree-one generator: representation paired with a 1-cycle label."""

    rep: Representation
    cycle: str


@dataclass(frozen=True)
class IndexTask:
    """Everything that determines one index computation."""

    rsd: RootSystemData
    g: int
    h: int
    u: Representation | None = None            # point test class
    v: Representation | None = None            # surface class, enters via s
    s_order: int = 0
    odd: tuple = ()
    intersection: np.ndarray | None = None     # pairwise #C_i C_j, antisymmetric
    flag_weight: np.ndarray | None = None      # Borel weight mu; enables flag mode
    fiber_differentials: bool = False

    def __post_init__(self):
        if int(self.g) != self.g or self.g < 2:
            raise ConfigError("genus g must be an integer >= 2")
        if int(self.h) != self.h or self.h < 0:
            raise ConfigError("level h must be a nonnegative integer")
        if len(self.odd) % 2 != 0:
            raise ConfigError("odd insertions must come in pairs")
        if self.odd:
            M = np.asarray(self.intersection)
            if M.shape != (len(self.odd), len(self.odd)):
                raise ConfigError("intersection matrix shape must match the insertions")
            if not np.array_equal(M, -M.T):
                raise ConfigError("intersection matrix must be antisymmetric")
        if self.s_order > 0 and self.v is None:
            raise ConfigError("positive s order requires a representation V")
        if self.fiber_differentials and self.flag_weight is None:
            raise ConfigError("fiber differentials only apply in full-flag mode")
        if self.flag_weight is not None and self.u is not None:
            raise ConfigError("use either a test representation U or a flag weight, not both")
        if self.flag_weight is not None and len(np.asarray(self.flag_weight)) != self.rsd.rank:
            raise ConfigError("flag weight has wrong rank")

    @property
    def full_flag(self) -> bool:
        return self.flag_weight is not None

    @property
    def u_effective(self) -> Representation:
        return self.u if self.u is not None else trivial_rep(self.rsd.rank)

    def degree_bound(self) -> int:
        d = (self.g - 1) * self.rsd.dim_group
        if self.full_flag and self.fiber_differentials:
            d += self.rsd.n_positive
        return d


@dataclass(frozen=True)
class HessianForm:
    """Symmetric matrix of the fixed-point equation's differential."""

    matrix: np.ndarray
    det_norm: object  # complex or Jet; equals 1 at s = t = 0 on solutions

    def pair_covectors(self, u, v):
        """Bilinear form <u|v> = u . Hinv . v on covectors."""
        x = generic_solve(self.matrix, list(np.asarray(v))) \
            if np.asarray(self.matrix).dtype == object \
            else np.linalg.solve(self.matrix, np.asarray(v, dtype=self.matrix.dtype))
        acc = 0.0
        for a, b in zip(np.asarray(u), x):
            acc = acc + a * b
        return acc


def hessian(rsd: RootSystemData, xi, t, s=0.0, h: int = 0,
            v: Representation | None = None) -> HessianForm:
    """Assemble the Hessian and its normalized determinant at a point."""
    xi_arr = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi)
    if xi_arr.dtype != object:
        z = np.exp(rsd.roots @ xi_arr)
        bad = np.abs(1.0 + t * z) < 1e-13
        if np.any(bad):
            root = rsd.roots[int(np.argmax(bad))]
            raise SingularEvaluationError(f"vanishing root factor 1+t*e^alpha at alpha={tuple(root)}")
    H = hessian_matrix(rsd, xi_arr, t, s=s, h=h, v=v)
    m = h + rsd.dual_coxeter
    ref = float(m)**rsd.rank * rsd.det_gram
    if np.asarray(H).dtype == np.complex128:
        det = np.linalg.det(np.asarray(H))
    else:
        det = generic_det(H)
    return HessianForm(matrix=H, det_norm=det / ref)


def theta_inverse(rsd: RootSystemData, xi, t, s=0.0, h: int = 0,
                  v: Representation | None = None, n_points: int | None = None,
                  singular_tol: float = 1e-10):
    """theta(f)^{-1}: count times the full root product times det_norm."""
    xi_arr = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi)
    count = count_solutions(rsd, h) if n_points is None else n_points
    z = vexp(np.dot(rsd.roots, xi_arr))
    prod = 1.0 + 0.0j
    for zi in z:
        denom = 1.0 - zi
        dc = abs(denom.const if isinstance(denom, Jet) else complex(denom))
        if dc < singular_tol:
            raise SingularEvaluationError(
                "theta undefined at a singular point (some e^alpha = 1)")
        prod = prod * ((1.0 + t * zi) / denom)
    hf = hessian(rsd, xi_arr, t, s=s, h=h, v=v)
    return count * prod * hf.det_norm


def odd_cofactor(rsd: RootSystemData, xi, insertions, intersection, H: HessianForm):
    """Sum over complete contractions of the odd-generator pair pairings.

    Each matching contributes the product over matched pairs (i < j) of
    #C_i C_j * (dTr_{W_i} . Hinv . dTr_{W_j}); the empty insertion list
    contributes 1.
    """
    k = len(insertions)
    if k == 0:
        return 1.0
    if k % 2:
        raise ConfigError("odd insertion count must be even")
    xi_arr = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi)
    M = np.asarray(intersection)
    grads = [character_jets(ins.rep, xi_arr)[1] for ins in insertions]
    P = {}
    for i in range(k):
        for j in range(i + 1, k):
            P[(i, j)] = H.pair_covectors(grads[i], grads[j])

    def matchings(free):
        if not free:
            yield ()
            return
        i = free[0]
        for pos in range(1, len(free)):
            j = free[pos]
            rest = free[1:pos] + free[pos + 1:]
            for tail in matchings(rest):
                yield ((i, j),) + tail

    total = 0.0
    for match in matchings(tuple(range(k))):
        term = 1.0
        for (i, j) in match:
            term = term * (int(M[i, j]) * P[(i, j)])
        total = total + term
    return total


def _point_at(rsd, task: IndexTask, path, t, controls: TrackControls):
    """Path point at t, upgraded to a jet point when s insertions are present.

    The stored sample satisfies the tracking tolerance; it is polished to the
    machine-noise floor here because the coefficient extraction downstream
    amplifies per-sample errors by the basis-change conditioning.
    """
    xi = path.xi_at(t)
    if task.s_order == 0 or task.v is None:
        polished = newton_correct(rsd, task.h, xi, t, path.branch, tol=1e-16, max_iter=6)
        return np.asarray(polished.xi), 0.0
    s = Jet.variable(task.s_order)
    xi_jets = np.array([Jet.constant(x, task.s_order) for x in xi], dtype=object)
    pt = newton_correct(rsd, task.h, xi_jets, t, path.branch, tol=controls.newton_tol,
                        max_iter=controls.max_newton_iter, s=s, v=task.v)
    return np.asarray(pt.xi), s


def _trace_u(task: IndexTask, xi_arr):
    u = task.u_effective
    if u.dimension == 1 and not u.weights.any():
        return 1.0
    tr, _, _ = character_jets(u, xi_arr)
    return tr


def _sorted_regular_reps(paths):
    reps = [p for p in paths if p.is_representative and p.regular_t0]
    return sorted(reps, key=lambda p: p.branch)


def rhs_sum(rsd: RootSystemData, task: IndexTask, paths, t,
            controls: TrackControls = TrackControls()):
    """(1+t)^{(g-1) rank} times the orbit-representative sum of theta^{1-g} Tr_U.

    Requires every regular representative path to carry a sample at t.
    """
    if task.full_flag:
        raise ConfigError("use flag_rhs_sum for full-flag tasks")
    reps = _sorted_regular_reps(paths)
    if not reps:
        raise ConfigError("no regular representative paths supplied")
    pref = (1.0 + t) ** ((task.g - 1) * rsd.rank)
    total = 0.0
    for p in reps:
        xi, s = _point_at(rsd, task, p, t, controls)
        th_inv = theta_inverse(rsd, xi, t, s=s, h=task.h, v=task.v)
        term = (th_inv ** (task.g - 1)) * _trace_u(task, xi)
        if task.odd:
            hf = hessian(rsd, xi, t, s=s, h=task.h, v=task.v)
            term = term * odd_cofactor(rsd, xi, task.odd, task.intersection, hf)
        total = total + term
    return pref * total


def flag_rhs_sum(rsd: RootSystemData, task: IndexTask, paths, t,
                 controls: TrackControls = TrackControls()):
    """Full-flag variant: sum over all regular points with the Borel weight.

    Orbits are expanded by letting the Weyl group act on the representative's
    coordinates; theta is Weyl invariant so only the flag factors vary.
    """
    if not task.full_flag:
        raise ConfigError("flag_rhs_sum needs a flag weight on the task")
    reps = _sorted_regular_reps(paths)
    if not reps:
        raise ConfigError("no regular representative paths supplied")
    mu = np.asarray(task.flag_weight, dtype=np.int64)
    pos = rsd.positive_roots
    pref = (1.0 + t) ** ((task.g - 1) * rsd.rank)
    total = 0.0
    for p in reps:
        xi, s = _point_at(rsd, task, p, t, controls)
        th_inv = theta_inverse(rsd, xi, t, s=s, h=task.h, v=task.v)
        orbit_factor = 0.0
        for W in rsd.weyl_vector_matrices:
            xw = np.dot(W, xi)
            zpos = vexp(np.dot(pos, xw))
            inner = _scalar_exp(np.dot(mu, xw)) if mu.any() else 1.0
            for zi in zpos:
                denom = 1.0 - zi
                inner = inner / denom
                if task.fiber_differentials:
                    inner = inner * (1.0 + t * zi)
            orbit_factor = orbit_factor + inner
        total = total + (th_inv ** (task.g - 1)) * orbit_factor
    return pref * total


def _scalar_exp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def master_potential(rsd: RootSystemData, xi, t, s=0.0, h: int = 0,
                     v: Representation | None = None):
    """Scalar potential whose gradient is log_chi and whose Hessian matches.

    Value: (h+c)/2 * b(xi, xi) + s * Tr_V(e^xi) + sum_{all roots} Li2(-t e^{alpha(xi)}).
    The dilogarithm sign is pinned by requiring exact agreement of the
    derivatives with the tracked equation; at xi = 0 and s = 0 the value is
    (dim G - rank) * Li2(-t).
    """
    xi_arr = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi, dtype=np.complex128)
    m = h + rsd.dual_coxeter
    val = 0.5 * m * (xi_arr @ rsd.gram.astype(np.float64) @ xi_arr)
    if v is not None and s != 0.0:
        tr, _, _ = character_jets(v, xi_arr)
        val = val + s * tr
    if t != 0.0:
        z = np.exp(rsd.roots @ xi_arr)
        val = val + np.sum(dilog(-t * z))
    return val


def chebyshev_nodes(a: float, b: float, n: int) -> np.ndarray:
    """n Chebyshev-Lobatto nodes on [a, b], endpoints included, descending."""
    if n < 2:
        raise ConfigError("need at least two nodes")
    j = np.arange(n)
    u = np.cos(np.pi * j / (n - 1))
    return np.sort(0.5 * (a + b) + 0.5 * (b - a) * u)[::-1]


@dataclass(frozen=True)
class IndexResult:
    """Sampled right-hand side plus the reconstructed polynomial."""

    group: str
    g: int
    h: int
    nodes: np.ndarray
    values: np.ndarray            # shape (n_nodes, s_order + 1)
    polynomial: np.ndarray        # shape (s_order + 1, degree + 1), t-power basis
    residual: float
    snapped: bool
    vanishing_order: int
    value_t0: complex
    per_point: tuple = field(default=())
    degree: int = 0

    @property
    def polynomial_t(self) -> KPolynomial:
        coeffs = self.polynomial[0]
        if self.snapped:
            return KPolynomial(tuple(int(round(c.real)) for c in coeffs), len(coeffs) - 1)
        return KPolynomial(tuple(complex(c) for c in coeffs), len(coeffs) - 1)


def _fit_power_basis(nodes, samples, degree, t_min):
    """Least squares in the Chebyshev basis of [t_min, 0], returned in powers of t."""
    u = (2.0 * np.asarray(nodes) - t_min) / (0.0 - t_min)  # maps to [-1, 1]
    design = np.polynomial.chebyshev.chebvander(u, degree)
    coef, *_ = np.linalg.lstsq(design, np.asarray(samples), rcond=None)
    fitted = design @ coef
    resid = float(np.max(np.abs(fitted - np.asarray(samples))))
    cheb = np.polynomial.Chebyshev(coef, domain=[t_min, 0.0])
    power = cheb.convert(kind=np.polynomial.Polynomial)
    coeffs = np.zeros(degree + 1, dtype=np.complex128)
    coeffs[: len(power.coef)] = power.coef
    return coeffs, resid


def fit_polynomial(task: IndexTask, nodes=None, n_nodes: int | None = None,
                   t_min: float = -0.9, controls: TrackControls = TrackControls(),
                   snap_tol: float = 1e-6, residual_bound: float = 1e-6,
                   tracked: FixedPointSet | None = None) -> IndexResult:
    """Reconstruct the index polynomial for a task by sampling and fitting.

    Nodes default to Chebyshev-Lobatto points on [t_min, 0]; the fit degree is
    the dimension bound of the task. A residual above residual_bound (relative
    to the largest sample) raises rather than silently snapping.
    """
    rsd = task.rsd
    degree = task.degree_bound()
    if nodes is None:
        if n_nodes is None:
            n_nodes = degree + 8
        nodes = chebyshev_nodes(t_min, 0.0, n_nodes)
    nodes = np.asarray(sorted(set(float(t) for t in nodes), reverse=True))
    if len(nodes) < degree + 1:
        raise ConfigError(f"{len(nodes)} nodes cannot determine a degree-{degree} polynomial")
    if nodes[0] != 0.0:
        nodes = np.concatenate([[0.0], nodes])

    if tracked is None:
        fps = enumerate_t0(rsd, task.h, controls)
        schedule = make_schedule(float(nodes[-1]), controls, extra_nodes=nodes)
        tracked = track_set(rsd, fps, schedule, controls, representatives_only=True)

    evaluator = flag_rhs_sum if task.full_flag else rhs_sum
    raw = [evaluator(rsd, task, tracked.paths, float(t), controls) for t in nodes]
    vals = np.zeros((len(nodes), task.s_order + 1), dtype=np.complex128)
    for i, vv in enumerate(raw):
        if isinstance(vv, Jet):
            vals[i, : vv.order + 1] = vv.c
        else:
            vals[i, 0] = vv

    scale = max(1.0, float(np.max(np.abs(vals[:, 0]))))
    poly = np.zeros((task.s_order + 1, degree + 1), dtype=np.complex128)
    residual = 0.0
    for k in range(task.s_order + 1):
        coeffs, resid = _fit_power_basis(nodes, vals[:, k], degree, float(min(nodes)))
        poly[k] = coeffs
        residual = max(residual, resid)
    if residual > residual_bound * scale:
        raise FitFailureError(
            f"fit residual {residual:.3e} exceeds {residual_bound:.1e} * scale {scale:.3e}")

    snapped = False
    if task.s_order == 0 and not task.full_flag and not task.odd:
        dev = float(np.max(np.abs(poly[0] - np.round(poly[0].real))))
        if dev <= snap_tol:
            snapped = True

    order_poly = KPolynomial(tuple(int(round(c.real)) for c in poly[0]), degree) if snapped \
        else KPolynomial(tuple(poly[0]), degree)
    vorder = vanishing_order_at_minus1(order_poly, tol=1e-8)

    per_point = []
    for p in _sorted_regular_reps(tracked.paths):
        th = theta_inverse(rsd, p.xi_at(0.0), 0.0, h=task.h) ** (task.g - 1)
        per_point.append((p.branch, complex(th)))

    return IndexResult(
        group=rsd.name, g=task.g, h=task.h, nodes=nodes, values=vals, polynomial=poly,
        residual=residual, snapped=snapped, vanishing_order=vorder,
        value_t0=complex(vals[0, 0]), per_point=tuple(per_point), degree=degree)


def vanishing_check(task: IndexTask, result: IndexResult | None = None, **fit_kwargs) -> int:
    """Measured vanishing order at t = -1, or an error below the theorem bound."""
    if result is None:
        result = fit_polynomial(task, **fit_kwargs)
    bound = (task.g - 1) * task.rsd.rank
    if result.vanishing_order < bound:
        raise TheoremViolationError(
            f"vanishing order {result.vanishing_order} below (g-1)*rank = {bound} "
            f"for {task.rsd.name}, g={task.g}, h={task.h}")
    return result.vanishing_order


def verlinde_su2(g: int, h: int) -> float:
    """Closed-form rank-one comparison value for the t = 0 sum."""
    m = h + 2
    js = np.arange(1, h + 2)
    return float((m / 2.0) ** (g - 1) * np.sum(np.sin(js * np.pi / m) ** (2 - 2 * g)))
