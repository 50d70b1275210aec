from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vvindex import (KPolynomial, check_equivalence_ii_iii, gamma_from_lambda,
                     lambda_from_gamma, vanishing_order_at_minus1)
from vvindex.errors import ConfigError, NumericalError

coeff = st.floats(min_value=-8, max_value=8, allow_nan=False).map(lambda x: complex(round(x, 3)))


def test_line_bundle_gamma():
    # rank 1: lambda = 1 + t*v  ->  gamma = (1-t) + t*v
    v = 2.5 + 0.5j
    lam = KPolynomial((1, v), 1)
    gam = gamma_from_lambda(lam, 1)
    assert gam.coeffs == (1, v - 1)
    back = lambda_from_gamma(gam, 1)
    assert np.allclose([complex(c) for c in back.coeffs], [1, v])


def test_trivial_bundle_gamma():
    lam = KPolynomial((1, 3, 3, 1), 3)   # (1+t)^3
    gam = gamma_from_lambda(lam, 3)
    assert gam.coeffs == (1,)
    assert lambda_from_gamma(KPolynomial((1,), 2), 2).coeffs == (1, 2, 1)


def test_exact_arithmetic_stays_exact():
    lam = KPolynomial((Fraction(1), Fraction(1, 2), Fraction(3)), 4)
    gam = gamma_from_lambda(lam, 4)
    assert gam.exact
    back = lambda_from_gamma(gam, 4)
    assert back.coeffs == lam.coeffs


def test_degree_exceeds_rank():
    with pytest.raises(ConfigError):
        gamma_from_lambda(KPolynomial((1, 2, 3), 2), 1)


@settings(max_examples=80, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=5))
def test_roundtrip_random(cs):
    r = len(cs) - 1 + 2
    lam = KPolynomial(tuple(cs), r)
    back = lambda_from_gamma(gamma_from_lambda(lam, r), r)
    a = np.zeros(r + 1, dtype=complex)
    b = np.zeros(r + 1, dtype=complex)
    a[: len(lam.coeffs)] = [complex(c) for c in lam.coeffs]
    b[: len(back.coeffs)] = [complex(c) for c in back.coeffs]
    assert np.allclose(a, b, atol=1e-9)


def test_gamma_multiplicative():
    rng = np.random.default_rng(2)
    for _ in range(50):
        c1 = rng.normal(size=rng.integers(1, 4))
        c2 = rng.normal(size=rng.integers(1, 4))
        r1, r2 = len(c1) + 1, len(c2)
        p1 = KPolynomial(tuple(c1), r1)
        p2 = KPolynomial(tuple(c2), r2)
        lhs = gamma_from_lambda(p1.multiply(p2), r1 + r2)
        rhs = gamma_from_lambda(p1, r1).multiply(gamma_from_lambda(p2, r2))
        a = np.zeros(r1 + r2 + 1, dtype=complex)
        b = np.zeros(r1 + r2 + 1, dtype=complex)
        a[: len(lhs.coeffs)] = [complex(c) for c in lhs.coeffs]
        b[: len(rhs.coeffs)] = [complex(c) for c in rhs.coeffs]
        assert np.allclose(a, b, atol=1e-9)


def test_vanishing_order_examples():
    # (1+t)^2 (3 - t) = 3 + 5t + t^2 - t^3
    assert vanishing_order_at_minus1(KPolynomial((3, 5, 1, -1), 3)) == 2
    assert vanishing_order_at_minus1(KPolynomial((1, 1, 1), 2)) == 0  # value 1 at -1
    assert vanishing_order_at_minus1(KPolynomial((1, 5, 10, 10, 5, 1), 5)) == 5
    with pytest.raises(NumericalError):
        vanishing_order_at_minus1(KPolynomial((0, 0), 1))
    with pytest.raises(NumericalError):
        vanishing_order_at_minus1(KPolynomial((1e-12, 1e-13), 1), tol=1e-8)


def test_equivalence_constructed_and_generic():
    rng = np.random.default_rng(9)
    # lambda = (1+t)^r divisible by (1+t)^r and gamma = 1
    from math import comb
    r = 4
    lam = KPolynomial(tuple(comb(r, k) for k in range(r + 1)), r)
    assert check_equivalence_ii_iii(lam, r, r)
    # construct: zero the top-d gamma tail, invert, check both tests agree true
    for _ in range(50):
        r = int(rng.integers(2, 6))
        d = int(rng.integers(1, r))
        gam = np.round(rng.normal(size=r + 1), 6)
        gam[r - d + 1:] = 0.0
        lam = lambda_from_gamma(KPolynomial(tuple(gam), r), r)
        assert check_equivalence_ii_iii(lam, r, d)
    # generic polynomials are not divisible by (1+t)
    for _ in range(50):
        r = int(rng.integers(1, 6))
        cs = rng.normal(size=r + 1)
        if abs(np.polyval(cs[::-1], -1.0)) < 1e-3:
            continue
        assert not check_equivalence_ii_iii(KPolynomial(tuple(cs), r), r, 1)


def test_equivalence_property_thousand():
    # the two criteria agree on a large randomized mix of both kinds
    rng = np.random.default_rng(31)
    agree = 0
    for i in range(1000):
        r = int(rng.integers(1, 7))
        if i % 2:
            d = int(rng.integers(0, r + 1))
            gam = np.round(rng.normal(size=r + 1), 6)
            if d:
                gam[r - d + 1:] = 0.0
            lam = lambda_from_gamma(KPolynomial(tuple(gam), r), r)
            dd = d
        else:
            lam = KPolynomial(tuple(rng.normal(size=r + 1)), r)
            dd = int(rng.integers(0, r + 1))
        # must never raise: the two tests always give the same verdict
        check_equivalence_ii_iii(lam, r, dd)
        agree += 1
    assert agree == 1000


def test_polynomial_evaluation_and_trim():
    p = KPolynomial((2, 0, 1, 0, 0), 4)
    assert p.degree == 2
    assert p(2.0) == 6.0
