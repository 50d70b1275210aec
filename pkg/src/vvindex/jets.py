"""Truncated power series ("jets") in one formal variable.

A Jet holds the coefficients of a series a0 + a1*s + ... + aS*s**S and
truncates every operation at the fixed order S. Order 0 jets behave like
plain complex numbers; the rest of the package treats "scalar" generically
as either a python/numpy complex or a Jet, and the helpers at the bottom
(vexp, vlog, generic_solve, generic_det) dispatch on which one they got.

The multiplicative operations require an invertible constant term where
mathematically necessary (inverse, log, non-integer contexts).
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError


class Jet:
    """Coefficient vector of a truncated power series, index = power of s."""

    __slots__ = ("c",)

    # Let python operators win over numpy broadcasting when mixed with
    # numpy scalars or object arrays.
    __array_ufunc__ = None

    def __init__(self, coeffs):
        c = np.asarray(coeffs)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("Jet needs a non-empty 1-d coefficient vector")
        if not np.issubdtype(c.dtype, np.complexfloating):
            c = c.astype(np.complex128)
        self.c = c

    @classmethod
    def constant(cls, value, order, dtype=np.complex128):
        c = np.zeros(order + 1, dtype=dtype)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, order, value=0.0, dtype=np.complex128):
        """The jet of value + s (the expansion variable itself)."""
        c = np.zeros(order + 1, dtype=dtype)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def order(self):
        return len(self.c) - 1

    @property
    def const(self):
        """Constant (order zero) coefficient."""
        return complex(self.c[0])

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jet order mismatch")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Jet.constant(other, self.order, dtype=self.c.dtype)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.c + o.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.c - o.c)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(o.c - self.c)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.order + 1
        out = np.zeros(n, dtype=np.result_type(self.c.dtype, o.c.dtype))
        for k in range(n):
            out[k] = np.dot(self.c[: k + 1], o.c[k::-1])
        return Jet(out)

    __rmul__ = __mul__

    def inverse(self):
        a = self.c
        if a[0] == 0:
            raise NumericalError("jet with zero constant term is not invertible")
        n = self.order + 1
        out = np.zeros(n, dtype=a.dtype)
        out[0] = 1.0 / a[0]
        for k in range(1, n):
            out[k] = -np.dot(a[1 : k + 1], out[k - 1 :: -1]) / a[0]
        return Jet(out)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = Jet.constant(1.0, self.order, dtype=self.c.dtype)
        base = self
        k = int(n)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def exp(self):
        # e' = a' e gives k*e_k = sum_{j=1..k} j*a_j*e_{k-j}
        a = self.c
        n = self.order + 1
        out = np.zeros(n, dtype=a.dtype)
        out[0] = np.exp(a[0])
        for k in range(1, n):
            acc = 0.0
            for j in range(1, k + 1):
                acc = acc + j * a[j] * out[k - j]
            out[k] = acc / k
        return Jet(out)

    def log(self):
        a = self.c
        if a[0] == 0:
            raise NumericalError("log of jet with zero constant term")
        n = self.order + 1
        out = np.zeros(n, dtype=a.dtype)
        out[0] = np.log(a[0])
        for k in range(1, n):
            acc = k * a[k]
            for j in range(1, k):
                acc = acc - j * out[j] * a[k - j]
            out[k] = acc / (k * a[0])
        return Jet(out)

    def __repr__(self):
        return f"Jet({np.array2string(self.c, separator=', ')})"

    def isclose(self, other, tol=1e-12):
        o = self._coerce(other)
        return bool(np.all(np.abs(self.c - o.c) <= tol))


def _mag(x):
    """Pivot magnitude: constant term for jets, modulus otherwise."""
    if isinstance(x, Jet):
        return abs(x.const)
    return abs(x)


def vexp(a):
    """Elementwise exp for a complex ndarray or an object array of jets."""
    a = np.asarray(a)
    if a.dtype == object:
        return np.array([x.exp() if isinstance(x, Jet) else np.exp(x) for x in a.ravel()],
                        dtype=object).reshape(a.shape)
    return np.exp(a)


def vlog(a):
    """Elementwise principal log, same dispatch as vexp."""
    a = np.asarray(a)
    if a.dtype == object:
        return np.array([x.log() if isinstance(x, Jet) else np.log(complex(x)) for x in a.ravel()],
                        dtype=object).reshape(a.shape)
    return np.log(a)


def generic_solve(A, b):
    """Solve A x = b by Gaussian elimination with constant-term pivoting.

    Works for square matrices whose entries are complex numbers or jets
    (numpy object arrays or nested lists). For pure floating matrices prefer
    numpy.linalg.solve; this path exists for jet-valued systems.
    """
    A = [list(row) for row in A]
    b = list(b)
    n = len(A)
    for k in range(n):
        p = max(range(k, n), key=lambda i: _mag(A[i][k]))
        if _mag(A[p][k]) == 0.0:
            raise NumericalError("singular matrix in generic_solve")
        if p != k:
            A[k], A[p] = A[p], A[k]
            b[k], b[p] = b[p], b[k]
        piv = A[k][k]
        for i in range(k + 1, n):
            m = A[i][k] / piv
            for j in range(k + 1, n):
                A[i][j] = A[i][j] - m * A[k][j]
            b[i] = b[i] - m * b[k]
    x = [None] * n
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for j in range(i + 1, n):
            acc = acc - A[i][j] * x[j]
        x[i] = acc / A[i][i]
    return np.array(x, dtype=object)


def generic_det(A):
    """Determinant by the same elimination as generic_solve."""
    A = [list(row) for row in A]
    n = len(A)
    sign = 1.0
    det = 1.0
    for k in range(n):
        p = max(range(k, n), key=lambda i: _mag(A[i][k]))
        if _mag(A[p][k]) == 0.0:
            return 0.0 * A[0][0]
        if p != k:
            A[k], A[p] = A[p], A[k]
            sign = -sign
        piv = A[k][k]
        det = det * piv
        for i in range(k + 1, n):
            m = A[i][k] / piv
            for j in range(k + 1, n):
                A[i][j] = A[i][j] - m * A[k][j]
    return sign * det
