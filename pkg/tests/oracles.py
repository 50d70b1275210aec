"""Independent oracles the tests check the implementation against.

Everything here is deliberately naive: brute-force grids, direct series
summation, exhaustive enumeration. None of it shares code paths with the
package internals it validates.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product

import numpy as np


def grid_kernel_count(gram, m: int) -> int:
    """Count solutions of exp(m*b) = 1 by brute force over the denominator grid.

    Every solution has coordinates with denominator dividing D = m * |det B|,
    so scanning y = k/D over [0,1)^l and testing integrality of m*B*y finds
    them all.
    """
    gram = np.asarray(gram, dtype=np.int64)
    rank = gram.shape[0]
    det = int(round(np.linalg.det(gram.astype(np.float64))))
    D = m * abs(det)
    count = 0
    for k in product(range(D), repeat=rank):
        y = [Fraction(ki, D) for ki in k]
        vals = [m * sum(int(gram[i, j]) * y[j] for j in range(rank)) for i in range(rank)]
        if all(v.denominator == 1 for v in vals):
            count += 1
    return count


def verlinde_su2(g: int, h: int) -> float:
    """Classical rank-one trigonometric sum, written independently."""
    total = 0.0
    for j in range(1, h + 2):
        total += np.sin(j * np.pi / (h + 2)) ** (2 - 2 * g)
    return ((h + 2) / 2.0) ** (g - 1) * total


def adams_root_series(roots, xi, t, kmax=500, tol=1e-16):
    """sum_{k>0} (-t)^k / k * sum_{all roots} e^{k alpha(xi)} alpha, to convergence.

    Individual terms can vanish by symmetry, so the stop rule needs a run of
    consecutive small terms.
    """
    roots = np.asarray(roots, dtype=np.float64)
    xi = np.asarray(xi)
    acc = np.zeros(roots.shape[1], dtype=complex)
    small = 0
    for k in range(1, kmax + 1):
        term = ((-t) ** k / k) * (np.exp(k * (roots @ xi)) @ roots)
        acc = acc + term
        small = small + 1 if np.max(np.abs(term)) < tol else 0
        if small >= 4:
            break
    return acc


def alcove_weight_count(cartan, gram, highest_root, h: int) -> int:
    """Number of dominant integral weights of level at most h, by box scan."""
    gram = np.asarray(gram, dtype=np.int64)
    rank = gram.shape[0]
    Binv = np.linalg.inv(gram.astype(np.float64))
    theta_ck = Binv @ np.asarray(highest_root, dtype=np.float64)
    count = 0
    for lam in product(range(h + 1), repeat=rank):
        if np.dot(lam, theta_ck) <= h + 1e-9:
            count += 1
    return count


def matching_sum_bruteforce(k: int, intersection, pairings) -> complex:
    """Sum over perfect matchings via permutations, deduplicated explicitly."""
    total = 0.0
    seen = set()
    for perm in permutations(range(k)):
        pairs = tuple(sorted(tuple(sorted((perm[2 * i], perm[2 * i + 1])))
                             for i in range(k // 2)))
        if pairs in seen:
            continue
        seen.add(pairs)
        term = 1.0
        for (i, j) in pairs:
            term = term * (intersection[i][j] * pairings[(i, j)])
        total = total + term
    return total


def dilog_series(z: complex, kmax: int = 2_000_000, tol: float = 1e-16) -> complex:
    """Li2 by direct series for |z| < 1 (slow on purpose; test oracle only)."""
    z = complex(z)
    assert abs(z) < 1.0
    acc = 0.0
    zk = 1.0
    for k in range(1, kmax + 1):
        zk *= z
        term = zk / k**2
        acc += term
        if abs(term) < tol and k > 8:
            break
    return acc


def central_gradient(f, x, eps: float = 1e-6):
    x = np.asarray(x, dtype=complex)
    out = np.zeros(len(x), dtype=complex)
    for k in range(len(x)):
        e = np.zeros(len(x))
        e[k] = eps
        out[k] = (f(x + e) - f(x - e)) / (2 * eps)
    return out


def central_hessian(f, x, eps: float = 1e-4):
    x = np.asarray(x, dtype=complex)
    n = len(x)
    out = np.zeros((n, n), dtype=complex)
    for k in range(n):
        for l in range(n):
            ek = np.zeros(n)
            ek[k] = eps
            el = np.zeros(n)
            el[l] = eps
            out[k, l] = (f(x + ek + el) - f(x + ek - el)
                         - f(x - ek + el) + f(x - ek - el)) / (4 * eps * eps)
    return out


def weyl_dimension(gram, positive_roots, highest_weight) -> int:
    """Weyl dimension formula with the dual pairing, exact rationals."""
    gram = np.asarray(gram, dtype=np.int64)
    rank = gram.shape[0]
    det = Fraction(int(round(np.linalg.det(gram.astype(np.float64)))))
    adj = np.linalg.inv(gram.astype(np.float64)) * float(det)
    Binv = [[Fraction(int(round(adj[i, j]))) / det for j in range(rank)] for i in range(rank)]

    def ipd(u, v):
        return sum(Fraction(int(u[i])) * Binv[i][j] * Fraction(int(v[j]))
                   for i in range(rank) for j in range(rank))

    rho = [1] * rank
    lam_rho = [int(w) + 1 for w in highest_weight]
    num = Fraction(1)
    den = Fraction(1)
    for alpha in positive_roots:
        num *= ipd(lam_rho, alpha)
        den *= ipd(rho, alpha)
    val = num / den
    assert val.denominator == 1
    return int(val)
