import numpy as np
import pytest

from vvindex.lattice import (fraction_matrix_inverse, int_det,
                             quotient_representatives, smith_normal_form)


@pytest.mark.parametrize("M", [
    np.array([[6]]),
    np.array([[2, -1], [-1, 2]]),
    np.array([[4, 2], [2, 8]]),
    np.array([[2, 1, 0], [0, 3, 1], [1, 0, 4]]),
    np.array([[0, 2], [3, 0]]),
])
def test_snf_factorization(M):
    D, U, V = smith_normal_form(M)
    assert np.array_equal(U @ M @ V, D)
    assert abs(int_det(U)) == 1
    assert abs(int_det(V)) == 1
    diag = np.diag(D)
    assert np.all(D == np.diag(diag))
    for a, b in zip(diag, diag[1:]):
        if a != 0:
            assert b % a == 0


def test_int_det_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        M = rng.integers(-4, 5, size=(3, 3))
        assert int_det(M) == int(round(np.linalg.det(M.astype(float))))


def test_quotient_representatives_are_distinct_cosets():
    M = np.array([[2, -1], [-1, 2]]) * 2   # det 12
    reps = quotient_representatives(M)
    assert len(reps) == 12
    Minv = np.linalg.inv(M.astype(float))
    seen = set()
    for k in reps:
        frac = Minv @ k
        key = tuple(np.round(frac - np.floor(frac), 9))
        assert key not in seen
        seen.add(key)


def test_fraction_inverse_exact():
    M = np.array([[2, -1], [-1, 2]])
    Minv = fraction_matrix_inverse(M)
    prod = np.array([[sum(M[i][k] * Minv[k][j] for k in range(2)) for j in range(2)]
                     for i in range(2)])
    assert np.array_equal(prod, np.eye(2, dtype=object))
