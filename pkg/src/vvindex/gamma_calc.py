"""Polynomial algebra for exterior-power and K-theoretic Chern classes.

A rank-r bundle's exterior-power polynomial lambda_t has degree at most r;
its gamma-class polynomial is gamma_t = (1-t)^r * lambda_{t/(1-t)} and the
two determine each other through the mirror substitution. Divisibility of
lambda_t by (1+t)^d is equivalent to the vanishing of the top d gamma
coefficients, and both tests are implemented over inexact coefficients with
thresholds relative to the largest coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import ConfigError, NumericalError

DEFAULT_DIV_TOL = 1e-8


def _is_exact(values):
    return all(isinstance(v, (int, Fraction)) for v in values)


@dataclass(frozen=True)
class KPolynomial:
    """Polynomial in t with a nominal bundle rank attached.

    Coefficients may be exact (int / Fraction) or complex floats; exact
    inputs stay exact through the class transforms.
    """

    coeffs: tuple
    rank: int

    def __post_init__(self):
        cs = list(self.coeffs)
        while len(cs) > 1 and _is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        if self.rank < 0:
            raise ConfigError("rank must be nonnegative")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def exact(self):
        return _is_exact(self.coeffs)

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def max_abs(self):
        return max(abs(complex(c)) for c in self.coeffs)

    def multiply(self, other: "KPolynomial") -> "KPolynomial":
        n = self.degree + other.degree + 1
        exact = self.exact and other.exact
        out = [Fraction(0) if exact else 0j] * n
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return KPolynomial(tuple(out), self.rank + other.rank)


def _is_zero(c):
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c == 0 or abs(complex(c)) == 0.0


def _binomial_substitution(poly: KPolynomial, r: int, sign: int) -> tuple:
    """Coefficients of sum_k a_k t^k (1 + sign*t)^(r-k)."""
    exact = poly.exact
    out = [Fraction(0) if exact else 0j] * (r + 1)
    for k, a in enumerate(poly.coeffs):
        if _is_zero(a):
            continue
        for j in range(r - k + 1):
            term = a * comb(r - k, j) * (sign ** j if sign < 0 else 1)
            out[k + j] += term
    return tuple(out)


def gamma_from_lambda(lam: KPolynomial, r: int) -> KPolynomial:
    """gamma_t = (1-t)^r * lambda_{t/(1-t)}, exact on exact input."""
    if lam.degree > r:
        raise ConfigError(f"lambda polynomial of degree {lam.degree} exceeds rank {r}")
    return KPolynomial(_binomial_substitution(lam, r, sign=-1), r)


def lambda_from_gamma(gam: KPolynomial, r: int) -> KPolynomial:
    """Inverse transform lambda_t = (1+t)^r * gamma_{t/(1+t)}."""
    if gam.degree > r:
        raise ConfigError(f"gamma polynomial of degree {gam.degree} exceeds rank {r}")
    return KPolynomial(_binomial_substitution(gam, r, sign=+1), r)


def vanishing_order_at_minus1(p: KPolynomial, tol: float = DEFAULT_DIV_TOL) -> int:
    """Largest d with (1+t)^d dividing p, remainders judged against tol * max|coeff|.

    Synthetic division at t = -1 is applied repeatedly; the zero polynomial is
    rejected since every order would qualify.
    """
    scale = p.max_abs()
    if scale == 0 or all(abs(complex(c)) <= tol for c in p.coeffs):
        raise NumericalError("vanishing order of the (numerically) zero polynomial is undefined")
    coeffs = [complex(c) for c in p.coeffs]
    d = 0
    thresh = tol * scale
    while len(coeffs) > 0:
        # Horner at -1: remainder plus quotient coefficients
        quot = []
        acc = 0j
        for c in reversed(coeffs):
            acc = c - acc
            quot.append(acc)
        rem = quot.pop()
        if abs(rem) > thresh:
            return d
        d += 1
        coeffs = list(reversed(quot))
        if not coeffs:
            return d
    return d


def check_equivalence_ii_iii(lam: KPolynomial, r: int, d: int,
                             tol: float = DEFAULT_DIV_TOL) -> bool:
    """Test the two equivalent vanishing criteria and insist they agree.

    (ii): the top d gamma coefficients are below tolerance.
    (iii): (1+t)^d divides lambda_t below tolerance.
    """
    if d < 0 or d > r:
        raise ConfigError("vanishing depth d must satisfy 0 <= d <= r")
    gam = gamma_from_lambda(lam, r)
    gcoeffs = [complex(c) for c in gam.coeffs] + [0j] * (r + 1 - len(gam.coeffs))
    scale = max(lam.max_abs(), 1e-300)
    top_ok = all(abs(gcoeffs[k]) <= tol * scale for k in range(r - d + 1, r + 1))

    coeffs = [complex(c) for c in lam.coeffs]
    div_ok = True
    thresh = tol * scale
    for _ in range(d):
        quot = []
        acc = 0j
        for c in reversed(coeffs):
            acc = c - acc
            quot.append(acc)
        rem = quot.pop()
        if abs(rem) > thresh:
            div_ok = False
            break
        coeffs = list(reversed(quot))
        if not coeffs:
            break
    if top_ok != div_ok:
        raise NumericalError(
            f"gamma-tail and divisibility tests disagree (top_ok={top_ok}, div_ok={div_ok}); "
            "the polynomial sits on the tolerance boundary")
    return top_ok


def from_samples(coeffs, rank=None) -> KPolynomial:
    """Wrap a float coefficient array as a KPolynomial (rank defaults to degree)."""
    cs = [complex(c) for c in np.asarray(coeffs).ravel()]
    if rank is None:
        rank = len(cs) - 1
    return KPolynomial(tuple(cs), rank)
