"""Root systems, Weyl groups, torus points and characters for simple groups.

Coordinate conventions, fixed once for the whole package:

* Cartan-algebra vectors are written in the simple-coroot basis, so the
  coroot lattice is exactly Z^l.
* Weights and roots (covectors) are written in the fundamental-weight basis,
  so the weight lattice is Z^l and pairing a covector with a vector is the
  plain dot product.
* The basic inner form b is normalized so long roots have squared length 2.
  Its Gram matrix on simple coroots, B[i][j] = b(coroot_i, coroot_j), is an
  integer symmetric matrix; for the A series it equals the Cartan matrix.

With these choices a weight lam acts on xi as lam @ xi, the i-th simple root
is the i-th row of the Cartan matrix, and exp maps xi to the torus with
kernel 2*pi*i*Z^l.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigError, InternalError, UnsupportedGroupError
from .jets import vexp
from .lattice import fraction_matrix_inverse, int_det

_TWO_PI = 2.0 * np.pi

# family -> (min rank, max supported rank here, dual Coxeter number fn, Weyl order fn)
_FAMILIES = {
    "A": (1, 8, lambda l: l + 1, lambda l: _factorial(l + 1)),
    "B": (2, 6, lambda l: 2 * l - 1, lambda l: 2**l * _factorial(l)),
    "C": (2, 6, lambda l: l + 1, lambda l: 2**l * _factorial(l)),
    "D": (4, 6, lambda l: 2 * l - 2, lambda l: 2 ** (l - 1) * _factorial(l)),
    "G": (2, 2, lambda l: 4, lambda l: 12),
}


def _factorial(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _cartan_matrix(family, rank):
    A = 2 * np.eye(rank, dtype=np.int64)
    for i in range(rank - 1):
        A[i, i + 1] = -1
        A[i + 1, i] = -1
    if family == "A":
        return A
    if family == "B":
        # last simple root short
        A[rank - 2, rank - 1] = -2
        return A
    if family == "C":
        # last simple root long
        A[rank - 1, rank - 2] = -2
        return A
    if family == "D":
        A[rank - 2, rank - 1] = 0
        A[rank - 1, rank - 2] = 0
        A[rank - 3, rank - 1] = -1
        A[rank - 1, rank - 3] = -1
        return A
    if family == "G":
        return np.array([[2, -1], [-3, 2]], dtype=np.int64)
    raise UnsupportedGroupError(f"unknown family {family!r}")


def _inv_root_halves(family, rank):
    """1/d_i with d_i = (alpha_i, alpha_i)/2; integer for crystallographic types."""
    inv = np.ones(rank, dtype=np.int64)
    if family == "B":
        inv[rank - 1] = 2
    elif family == "C":
        inv[: rank - 1] = 2
    elif family == "G":
        inv[0] = 3
    return inv


@dataclass(frozen=True)
class RootSystemData:
    """Immutable combinatorial data of a simple, simply connected group."""

    family: str
    rank: int
    cartan: np.ndarray            # rows = simple roots in fundamental-weight coords
    gram: np.ndarray              # B[i][j] = b(coroot_i, coroot_j), integer
    roots: np.ndarray             # all roots as covectors, positive ones first
    positive_roots: np.ndarray
    root_simple_coords: np.ndarray  # expansion of each root over simple roots
    highest_root: np.ndarray
    dual_coxeter: int
    weyl_vector_matrices: tuple   # action on coroot-basis vectors
    weyl_covector_matrices: tuple  # matching action on weight-basis covectors
    weyl_lengths: np.ndarray
    _gram_inv: np.ndarray = field(repr=False, default=None)  # Fraction entries

    @property
    def n_positive(self):
        return len(self.positive_roots)

    @property
    def n_roots(self):
        return len(self.roots)

    @property
    def dim_group(self):
        return self.rank + self.n_roots

    @property
    def weyl_order(self):
        return len(self.weyl_vector_matrices)

    @property
    def det_gram(self):
        return int_det(self.gram)

    @property
    def gram_inv_fractions(self):
        return self._gram_inv

    @property
    def name(self):
        return f"{self.family}{self.rank}"

    def highest_coroot_coords(self):
        """Coordinates of the coroot of the highest root, exact Fractions."""
        return self._gram_inv @ np.array([Fraction(int(x)) for x in self.highest_root])

    def pairing_dual(self, u, v):
        """b-dual pairing of two covectors (exact when inputs are integral)."""
        uf = np.array([Fraction(int(x)) for x in np.asarray(u)])
        vf = np.array([Fraction(int(x)) for x in np.asarray(v)])
        return (uf @ self._gram_inv) @ vf

    def form(self, xi, eta):
        """The basic form b on two coroot-basis vectors."""
        return np.asarray(xi) @ self.gram.astype(np.float64) @ np.asarray(eta)


def build_root_system(family: str, rank: int) -> RootSystemData:
    """Construct root-system data for the given simple type.

    Parameters
    ----------
    family : one of "A", "B", "C", "D", "G"
    rank : positive rank within the supported table

    The whole object is derived from the Cartan matrix: roots by reflection
    closure of the simple roots, the Weyl group by closure of the simple
    reflections, and the Gram matrix of the basic form from the root lengths.
    """
    family = family.upper()
    if family not in _FAMILIES:
        raise UnsupportedGroupError(f"unsupported family {family!r} (have {sorted(_FAMILIES)})")
    lo, hi, cox_fn, weyl_fn = _FAMILIES[family]
    if not (lo <= rank <= hi):
        raise UnsupportedGroupError(f"{family}{rank}: rank must be in [{lo}, {hi}]")

    A = _cartan_matrix(family, rank)
    inv_d = _inv_root_halves(family, rank)
    B = (np.diag(inv_d) @ A).astype(np.int64)
    if not np.array_equal(B, B.T):
        raise InternalError("Gram matrix of the basic form must be symmetric")

    # roots: reflection closure of the simple roots (covector action)
    simple_cov = [tuple(int(x) for x in A[i]) for i in range(rank)]

    def reflect_cov(lam, i):
        return tuple(int(lam[j] - lam[i] * A[i, j]) for j in range(rank))

    roots = set(simple_cov)
    frontier = list(simple_cov)
    while frontier:
        lam = frontier.pop()
        for i in range(rank):
            nu = reflect_cov(lam, i)
            if nu not in roots:
                roots.add(nu)
                frontier.append(nu)

    AT_inv = fraction_matrix_inverse(A.T)

    def simple_coords(lam):
        vec = AT_inv @ np.array([Fraction(x) for x in lam])
        out = []
        for c in vec:
            if c.denominator != 1:
                raise InternalError("root with non-integral simple-root coordinates")
            out.append(int(c))
        return tuple(out)

    decorated = []
    for lam in roots:
        sc = simple_coords(lam)
        if all(c >= 0 for c in sc):
            decorated.append((sum(sc), lam, sc, True))
        elif all(c <= 0 for c in sc):
            decorated.append((sum(sc), lam, sc, False))
        else:
            raise InternalError("root neither positive nor negative")
    positive = sorted((d for d in decorated if d[3]), key=lambda d: (d[0], d[1]))
    negative = sorted((d for d in decorated if not d[3]), key=lambda d: (-d[0], d[1]))
    pos_arr = np.array([d[1] for d in positive], dtype=np.int64)
    all_arr = np.array([d[1] for d in positive] + [d[1] for d in negative], dtype=np.int64)
    simple_arr = np.array([d[2] for d in positive] + [d[2] for d in negative], dtype=np.int64)
    highest = np.array(positive[-1][1], dtype=np.int64)
    if len(positive) > 1 and positive[-1][0] == positive[-2][0]:
        raise InternalError("highest root is not unique")

    # Weyl group: closure of simple reflections, tracking vector and covector action
    gen_vec = []
    gen_cov = []
    for i in range(rank):
        S = np.eye(rank, dtype=np.int64)
        S[i, :] -= A[i, :]
        gen_vec.append(S)
        gen_cov.append(S.T.copy())

    ident = np.eye(rank, dtype=np.int64)
    seen = {ident.tobytes(): (ident, ident.copy(), 0)}
    frontier = [(ident, ident.copy(), 0)]
    while frontier:
        new_frontier = []
        for W, T, length in frontier:
            for i in range(rank):
                W2 = W @ gen_vec[i]
                key = W2.tobytes()
                if key not in seen:
                    T2 = T @ gen_cov[i]
                    seen[key] = (W2, T2, length + 1)
                    new_frontier.append((W2, T2, length + 1))
        frontier = new_frontier
    elements = sorted(seen.values(), key=lambda e: (e[2], e[0].tobytes()))
    if len(elements) != weyl_fn(rank):
        raise InternalError(f"Weyl closure produced {len(elements)} elements, expected {weyl_fn(rank)}")

    # recompute lengths as inversion counts to cross-check the word lengths
    pos_set = {tuple(int(x) for x in r) for r in pos_arr}
    lengths = []
    for W, T, word_len in elements:
        inv = 0
        for r in pos_arr:
            img = tuple(int(x) for x in T @ r)
            if img not in pos_set:
                inv += 1
        if inv != word_len:
            raise InternalError("Weyl length mismatch between word length and inversions")
        lengths.append(inv)

    rsd = RootSystemData(
        family=family,
        rank=rank,
        cartan=A,
        gram=B,
        roots=all_arr,
        positive_roots=pos_arr,
        root_simple_coords=simple_arr,
        highest_root=highest,
        dual_coxeter=int(cox_fn(rank)),
        weyl_vector_matrices=tuple(e[0] for e in elements),
        weyl_covector_matrices=tuple(e[1] for e in elements),
        weyl_lengths=np.array(lengths, dtype=np.int64),
        _gram_inv=fraction_matrix_inverse(B),
    )
    if rsd.n_roots != 2 * rsd.n_positive:
        raise InternalError("positive roots do not pair off")
    for arr in (rsd.cartan, rsd.gram, rsd.roots, rsd.positive_roots, rsd.highest_root,
                rsd.weyl_lengths, rsd.root_simple_coords):
        arr.setflags(write=False)
    return rsd


@dataclass(frozen=True)
class TorusPoint:
    """A point f = exp(xi) of the complexified torus, xi in coroot coordinates.

    Defined modulo 2*pi*i times the coroot lattice; canonicalize() picks the
    representative with Im(xi)/(2*pi) in [0, 1)^l.
    """

    xi: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi)
        if xi.dtype != object:
            xi = xi.astype(np.result_type(xi.dtype, np.complex128))
            xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)

    @property
    def rank(self):
        return len(self.xi)

    @property
    def y(self):
        """Im(xi) / (2*pi), the torus coordinate on the compact part."""
        return np.asarray([_const(v).imag for v in self.xi]) / _TWO_PI

    def is_compact(self, tol=1e-9):
        return max(abs(_const(v).real) for v in self.xi) <= tol


def _const(v):
    """Order-zero part of a scalar that may be a Jet."""
    c = getattr(v, "const", None)
    return complex(c) if c is not None else complex(v)


def torus_point_from_y(y, dtype=np.complex128):
    return TorusPoint(np.asarray(y, dtype=np.float64) * _TWO_PI * dtype(1j))


def canonicalize(p: TorusPoint, tol: float = 1e-9) -> TorusPoint:
    """Shift xi by 2*pi*i lattice vectors into the fundamental box."""
    xi = np.array([_const(v) for v in p.xi], dtype=np.complex128)
    y = xi.imag / _TWO_PI
    r = y - np.floor(y)
    r[r > 1.0 - tol] = 0.0
    return TorusPoint(xi.real + 1j * _TWO_PI * r)


def wrap_distance(y1, y2):
    """Distance between compact-torus coordinates modulo the integer lattice."""
    d = np.asarray(y1) - np.asarray(y2)
    d = d - np.round(d)
    return float(np.max(np.abs(d)))


@dataclass(frozen=True)
class RegularityReport:
    is_regular: bool
    witnesses: tuple  # root covectors with e^alpha(f) == 1 (within tol)


def regularity(rsd: RootSystemData, p: TorusPoint, tol: float = 1e-8) -> RegularityReport:
    """Classify a torus point as regular or singular, with witness roots."""
    xi = np.array([_const(v) for v in p.xi])
    vals = np.exp(rsd.roots @ xi)
    bad = np.abs(vals - 1.0) <= tol
    witnesses = tuple(tuple(int(x) for x in r) for r in rsd.roots[bad])
    return RegularityReport(is_regular=not bad.any(), witnesses=witnesses)


@dataclass(frozen=True)
class Representation:
    """A finite weight multiset; weights as integer covectors."""

    weights: np.ndarray
    mults: np.ndarray

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.weights, dtype=np.int64))
        m = np.asarray(self.mults, dtype=np.int64)
        if len(w) != len(m):
            raise ConfigError("weights and multiplicities differ in length")
        if np.any(m <= 0):
            raise ConfigError("multiplicities must be positive")
        order = np.lexsort(w.T[::-1])
        w = w[order]
        m = m[order]
        w.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "mults", m)

    @property
    def dimension(self):
        return int(self.mults.sum())

    def is_weyl_invariant(self, rsd: RootSystemData) -> bool:
        table = {tuple(int(x) for x in w): int(m) for w, m in zip(self.weights, self.mults)}
        for T in rsd.weyl_covector_matrices:
            for w, m in zip(self.weights, self.mults):
                if table.get(tuple(int(x) for x in T @ w)) != int(m):
                    return False
        return True


def trivial_rep(rank: int) -> Representation:
    return Representation(np.zeros((1, rank), dtype=np.int64), np.ones(1, dtype=np.int64))


def adjoint_rep(rsd: RootSystemData) -> Representation:
    """All roots with multiplicity one plus the zero weight with multiplicity rank."""
    weights = np.vstack([rsd.roots, np.zeros((1, rsd.rank), dtype=np.int64)])
    mults = np.concatenate([np.ones(rsd.n_roots, dtype=np.int64), [rsd.rank]])
    return Representation(weights, mults)


def _dominantize(rsd, lam):
    """Dominant Weyl-chamber representative of an integer covector."""
    lam = list(int(x) for x in lam)
    A = rsd.cartan
    guard = 4 * rsd.n_positive + 4
    for _ in range(guard):
        i = next((k for k in range(rsd.rank) if lam[k] < 0), None)
        if i is None:
            return tuple(lam)
        li = lam[i]
        for j in range(rsd.rank):
            lam[j] -= li * A[i, j]
    raise InternalError("dominantization did not terminate")


def highest_weight_rep(rsd: RootSystemData, highest: "np.ndarray") -> Representation:
    """Irreducible weight multiset from a dominant highest weight (Freudenthal).

    Weight membership uses saturation; multiplicities come from the standard
    recursion on dominant weights, then spread over Weyl orbits.
    """
    hw = tuple(int(x) for x in np.asarray(highest))
    if len(hw) != rsd.rank:
        raise ConfigError("highest weight has wrong rank")
    if any(x < 0 for x in hw):
        raise ConfigError("highest weight must be dominant (nonnegative coordinates)")

    A = rsd.cartan
    AT_inv = fraction_matrix_inverse(A.T)
    rho = np.ones(rsd.rank, dtype=np.int64)
    Binv = rsd.gram_inv_fractions

    def ipd(u, v):
        uf = np.array([Fraction(int(x)) for x in u])
        vf = np.array([Fraction(int(x)) for x in v])
        return (uf @ Binv) @ vf

    def root_coords(diff):
        vec = AT_inv @ np.array([Fraction(int(x)) for x in diff])
        if any(c.denominator != 1 for c in vec):
            return None
        return tuple(int(c) for c in vec)

    def is_weight(nu):
        dom = _dominantize(rsd, nu)
        coords = root_coords(np.array(hw) - np.array(dom))
        return coords is not None and all(c >= 0 for c in coords)

    weights = {hw}
    frontier = [hw]
    while frontier:
        lam = frontier.pop()
        for i in range(rsd.rank):
            nu = tuple(int(lam[j] - A[i, j]) for j in range(rsd.rank))
            if nu not in weights and is_weight(nu):
                weights.add(nu)
                frontier.append(nu)

    dominants = [w for w in weights if all(x >= 0 for x in w)]

    def height(w):
        coords = root_coords(np.array(hw) - np.array(w))
        return sum(coords)

    dominants.sort(key=height)
    mult = {hw: 1}
    hw_rho_sq = ipd(np.array(hw) + rho, np.array(hw) + rho)
    for mu in dominants:
        if mu == hw:
            continue
        acc = Fraction(0)
        for alpha in rsd.positive_roots:
            k = 1
            while True:
                nu = tuple(int(m + k * a) for m, a in zip(mu, alpha))
                if nu not in weights:
                    break
                m_nu = mult[_dominantize(rsd, nu)]
                acc += m_nu * ipd(np.array(nu), alpha)
                k += 1
        denom = hw_rho_sq - ipd(np.array(mu) + rho, np.array(mu) + rho)
        val = (2 * acc) / denom
        if val.denominator != 1 or val <= 0:
            raise InternalError(f"Freudenthal recursion produced multiplicity {val} at {mu}")
        mult[mu] = int(val)

    full = {w: mult[_dominantize(rsd, w)] for w in weights}
    arr = np.array(sorted(full), dtype=np.int64)
    mm = np.array([full[tuple(w)] for w in arr], dtype=np.int64)
    return Representation(arr, mm)


def character_jets(V: Representation, xi, s_hint=None):
    """Trace, gradient and Hessian of the character at exp(xi).

    Returns (Tr, dTr, H) where Tr = sum m * e^{lam(xi)}, dTr is the covector
    sum m * e^{lam(xi)} * lam and H the matrix sum m * e^{lam(xi)} * lam x lam.
    Entries are jets whenever xi has jet coordinates; s_hint is unused beyond
    fixing the jet order of constants and may be omitted.
    """
    xi = np.asarray(xi.xi if isinstance(xi, TorusPoint) else xi)
    W = V.weights
    e = vexp(W @ xi)
    me = e * V.mults
    rank = W.shape[1]
    if xi.dtype == object:
        tr = me.sum()
        dtr = np.dot(me, W)
        H = np.empty((rank, rank), dtype=object)
        for j in range(rank):
            for k in range(rank):
                H[j, k] = np.dot(me, W[:, j] * W[:, k])
        return tr, dtr, H
    tr = me.sum()
    dtr = me @ W.astype(me.dtype)
    H = np.einsum("i,ij,ik->jk", me, W, W)
    return tr, dtr, H


def flag_poincare(rsd: RootSystemData, t) -> complex:
    """Sum over the Weyl group of (-t) to the length; equals |W| at t = -1."""
    vals = np.array([(-t) ** int(k) if k else 1.0 for k in rsd.weyl_lengths])
    return vals.sum()


def dominant_weights_at_level(rsd: RootSystemData, h: int):
    """Dominant integral weights lam with lam(theta_coroot) <= h, exact count."""
    if h < 0:
        raise ConfigError("level must be nonnegative")
    theta_ck = rsd.highest_coroot_coords()
    out = []

    def rec(prefix):
        if len(prefix) == rsd.rank:
            lvl = sum(Fraction(int(a)) * b for a, b in zip(prefix, theta_ck))
            if lvl <= h:
                out.append(tuple(prefix))
            return
        for v in range(h + 1):
            rec(prefix + [v])

    rec([])
    return out


def _orbit_y_float(rsd, y, tol=1e-9):
    """Canonical mod-1 images of y under the Weyl group, as rounded keys."""
    pts = {}
    for Wm in rsd.weyl_vector_matrices:
        z = Wm @ np.asarray(y)
        r = z - np.floor(z)
        r[r > 1.0 - tol] = 0.0
        key = tuple(np.round(r / tol).astype(np.int64))
        pts.setdefault(key, r)
    return pts


def _in_closed_alcove_float(rsd, y, tol=1e-9):
    Ay = rsd.cartan @ np.asarray(y)
    if np.any(Ay < -tol):
        return False
    return float(rsd.highest_root @ np.asarray(y)) <= 1.0 + tol


def orbit_representatives(rsd: RootSystemData, points, tol: float = 1e-9):
    """One dominant (closed-alcove) representative per Weyl orbit of the inputs.

    Points are compared modulo the affine action (Weyl group plus coroot
    lattice). Two inputs landing on the same torus point raise an error, as
    that indicates an inconsistent multiset.
    """
    reps = []
    seen_orbit_keys = {}
    seen_point_keys = set()
    for p in points:
        q = canonicalize(p, tol)
        y = q.y
        pkey = tuple(np.round(y / tol).astype(np.int64))
        if pkey in seen_point_keys:
            raise ConfigError("duplicate torus point in orbit_representatives input")
        seen_point_keys.add(pkey)
        orbit = _orbit_y_float(rsd, y, tol)
        okey = min(orbit.keys())
        if okey in seen_orbit_keys:
            continue
        # search alcove member among lattice translates of the orbit points
        # (the closed alcove sits in [0, 1]^l, so only 0/+1 shifts can help)
        rep_y = None
        shifts = np.stack(np.meshgrid(*([[0.0, 1.0]] * rsd.rank), indexing="ij"),
                          axis=-1).reshape(-1, rsd.rank)
        for cand in orbit.values():
            for dlt in shifts:
                z = cand + dlt
                if _in_closed_alcove_float(rsd, z, tol):
                    rep_y = z
                    break
            if rep_y is not None:
                break
        if rep_y is None:
            raise InternalError("Weyl orbit without closed-alcove member")
        seen_orbit_keys[okey] = rep_y
        reps.append(torus_point_from_y(rep_y))
    return reps
