"""Integer matrix utilities: Smith normal form and exact determinants.

Used to enumerate the kernel of an isogeny of the torus, i.e. the points of
(1/m) * Binv * Z^l modulo Z^l, without floating-point dedup heuristics.
All arithmetic is over python ints (exact).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def int_det(M) -> int:
    """Exact determinant of an integer matrix (fraction-free via Fractions)."""
    A = [[Fraction(int(x)) for x in row] for row in np.asarray(M)]
    n = len(A)
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != 0), None)
        if p is None:
            return 0
        if p != k:
            A[k], A[p] = A[p], A[k]
            det = -det
        det *= A[k][k]
        for i in range(k + 1, n):
            m = A[i][k] / A[k][k]
            for j in range(k, n):
                A[i][j] -= m * A[k][j]
    assert det.denominator == 1
    return int(det)


def smith_normal_form(M):
    """Return (D, U, V) with U @ M @ V = D, U and V unimodular, D diagonal.

    The diagonal entries of D are nonnegative and each divides the next.
    """
    A = [[int(x) for x in row] for row in np.asarray(M)]
    n = len(A)
    m = len(A[0])
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(n, m):
        # find a pivot
        piv = None
        for i in range(t, n):
            for j in range(t, m):
                if A[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            # clear column t
            done = True
            for i in range(t + 1, n):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t] != 0:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, m):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j] != 0:
                        swap_cols(t, j)
                        done = False
            if done:
                break
        # enforce divisibility of later entries by A[t][t]
        fixed = True
        for i in range(t + 1, n):
            for j in range(t + 1, m):
                if A[i][j] % A[t][t] != 0:
                    add_row(t, i, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            if A[t][t] < 0:
                A[t] = [-x for x in A[t]]
                U[t] = [-x for x in U[t]]
            t += 1

    D = np.array(A, dtype=np.int64)
    return D, np.array(U, dtype=np.int64), np.array(V, dtype=np.int64)


def quotient_representatives(M):
    """Representatives of Z^l / (M Z^l) for a nonsingular integer matrix M.

    Yields integer vectors k such that every coset appears exactly once.
    """
    M = np.asarray(M)
    D, U, _V = smith_normal_form(M)
    diag = np.diag(D)
    if np.any(diag == 0):
        raise ValueError("quotient_representatives needs a nonsingular matrix")
    # M Z^l = Uinv D Z^l, so cosets are x = Uinv r, r in the diagonal box.
    Uinv_frac = fraction_matrix_inverse(U)
    Uinv_int = np.array([[int(x) for x in row] for row in Uinv_frac], dtype=np.int64)
    idx = [range(int(d)) for d in diag]
    out = []
    for r in np.stack(np.meshgrid(*idx, indexing="ij"), axis=-1).reshape(-1, len(diag)):
        out.append(Uinv_int @ r)
    return out


def fraction_matrix_inverse(M):
    """Exact inverse of an integer matrix as a Fraction ndarray (object dtype)."""
    A = [[Fraction(int(x)) for x in row] for row in np.asarray(M)]
    n = len(A)
    I = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != 0), None)
        if p is None:
            raise ValueError("singular matrix")
        A[k], A[p] = A[p], A[k]
        I[k], I[p] = I[p], I[k]
        piv = A[k][k]
        A[k] = [x / piv for x in A[k]]
        I[k] = [x / piv for x in I[k]]
        for i in range(n):
            if i != k and A[i][k] != 0:
                m = A[i][k]
                A[i] = [a - m * b for a, b in zip(A[i], A[k])]
                I[i] = [a - m * b for a, b in zip(I[i], I[k])]
    return np.array(I, dtype=object)
