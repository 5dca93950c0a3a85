"""Truncated power series on the disk and bidisk.

Everything analytic in this toolkit is carried by one of two containers:

* :class:`PowerSeries1` -- coefficients ``c[0..N]`` of ``sum_j c_j z**j``,
* :class:`PowerSeries2` -- a square grid ``c[0..N, 0..N]`` of coefficients of
  ``sum_{j,k} c_{jk} z**j w**k``.

A series of order ``N`` represents the truncation of a (generally infinite)
Taylor expansion: coefficients beyond the stored order are *unknown*, not
zero.  Binary operations therefore truncate to the smaller operand order and
never extend an operand implicitly; this keeps truncation closed and prevents
fake precision.

Sesquianalytic kernels (holomorphic in ``z`` and in ``conj(w)``) are stored
as ordinary :class:`PowerSeries2` in the variables ``(z, v)`` with the
contract ``v := conj(w)`` supplied at evaluation time by the caller.

All instances are immutable after construction and safe to share between
threads; the operations below are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

# Tolerance for the unit-constant-term precondition of log().
TOL_CONST = 1e-10
# Tolerance for the divisibility precondition of divide_by_vanishing_factor().
TOL_DIV = 1e-9


def _as_coeff_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d coefficient array, got shape {arr.shape}")
    if ndim == 2 and arr.shape[0] != arr.shape[1]:
        raise ValueError(f"bivariate coefficient grid must be square, got {arr.shape}")
    if arr.size == 0:
        raise ValueError("coefficient array must be nonempty")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PowerSeries1:
    """Univariate truncated Taylor series ``sum_{j=0}^{N} c_j z**j``."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs, 1))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def zero(order: int) -> "PowerSeries1":
        return PowerSeries1(np.zeros(order + 1))

    @staticmethod
    def one(order: int) -> "PowerSeries1":
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = 1.0
        return PowerSeries1(c)

    def truncate(self, order: int) -> "PowerSeries1":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return PowerSeries1(self.coeffs[: order + 1])

    def __add__(self, other: "PowerSeries1") -> "PowerSeries1":
        n = min(self.order, other.order)
        return PowerSeries1(self.coeffs[: n + 1] + other.coeffs[: n + 1])

    def __sub__(self, other: "PowerSeries1") -> "PowerSeries1":
        n = min(self.order, other.order)
        return PowerSeries1(self.coeffs[: n + 1] - other.coeffs[: n + 1])

    def __mul__(self, other) -> "PowerSeries1":
        if isinstance(other, PowerSeries1):
            n = min(self.order, other.order)
            prod = np.convolve(self.coeffs[: n + 1], other.coeffs[: n + 1])
            return PowerSeries1(prod[: n + 1])
        return self.scale(other)

    def __rmul__(self, scalar) -> "PowerSeries1":
        return self.scale(scalar)

    def __neg__(self) -> "PowerSeries1":
        return PowerSeries1(-self.coeffs)

    def scale(self, scalar) -> "PowerSeries1":
        return PowerSeries1(self.coeffs * complex(scalar))

    def diff(self) -> "PowerSeries1":
        """Formal derivative; order drops by one."""
        if self.order == 0:
            return PowerSeries1.zero(0)
        j = np.arange(1, self.order + 1)
        return PowerSeries1(self.coeffs[1:] * j)

    def log(self) -> "PowerSeries1":
        """Series ``L`` with ``exp(L) = self`` to truncation order.

        Requires a unit constant term (within :data:`TOL_CONST`); computed by
        the standard recursion obtained from ``a' = L' a``.
        """
        a = self.coeffs
        if abs(a[0]) <= TOL_CONST:
            raise ValueError("log of a series with (near-)zero constant term")
        if abs(a[0] - 1.0) > TOL_CONST:
            raise ValueError(f"log requires unit constant term, got {a[0]}")
        n = self.order
        out = np.zeros(n + 1, dtype=np.complex128)
        for m in range(1, n + 1):
            acc = 0.0 + 0.0j
            for k in range(1, m):
                acc += k * out[k] * a[m - k]
            out[m] = a[m] - acc / m
        return PowerSeries1(out)

    def exp(self) -> "PowerSeries1":
        """Series ``E = exp(self)`` via the inverse recursion ``E' = a' E``."""
        a = self.coeffs
        n = self.order
        out = np.zeros(n + 1, dtype=np.complex128)
        out[0] = np.exp(a[0])
        for m in range(1, n + 1):
            acc = 0.0 + 0.0j
            for k in range(1, m + 1):
                acc += k * a[k] * out[m - k]
            out[m] = acc / m
        return PowerSeries1(out)

    def reciprocal(self) -> "PowerSeries1":
        """Series ``R`` with ``R * self = 1`` to truncation order."""
        a = self.coeffs
        if abs(a[0]) <= TOL_CONST:
            raise ValueError("reciprocal of a series with (near-)zero constant term")
        n = self.order
        out = np.zeros(n + 1, dtype=np.complex128)
        out[0] = 1.0 / a[0]
        for m in range(1, n + 1):
            out[m] = -np.dot(a[1 : m + 1], out[m - 1 :: -1][: m]) / a[0]
        return PowerSeries1(out)

    def eval(self, z):
        """Evaluate at scalar or array argument by Horner's scheme."""
        z = np.asarray(z, dtype=np.complex128)
        out = np.full(z.shape, self.coeffs[-1], dtype=np.complex128)
        for c in self.coeffs[-2::-1]:
            out = out * z + c
        return out if out.shape else complex(out)


@dataclass(frozen=True)
class PowerSeries2:
    """Bivariate truncated Taylor series on a square coefficient grid.

    ``coeffs[j, k]`` is the coefficient of ``z**j w**k``; the grid side is
    ``order + 1``.  ``is_symmetric`` tests the exchange symmetry
    ``c_{jk} = c_{kj}``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_array(self.coeffs, 2))

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @staticmethod
    def zero(order: int) -> "PowerSeries2":
        return PowerSeries2(np.zeros((order + 1, order + 1)))

    @staticmethod
    def one(order: int) -> "PowerSeries2":
        c = np.zeros((order + 1, order + 1), dtype=np.complex128)
        c[0, 0] = 1.0
        return PowerSeries2(c)

    def truncate(self, order: int) -> "PowerSeries2":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return PowerSeries2(self.coeffs[: order + 1, : order + 1])

    def is_symmetric(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.coeffs - self.coeffs.T)) <= tol)

    def transpose(self) -> "PowerSeries2":
        """Exchange the two variables."""
        return PowerSeries2(self.coeffs.T)

    def __add__(self, other: "PowerSeries2") -> "PowerSeries2":
        n = min(self.order, other.order)
        return PowerSeries2(self.coeffs[: n + 1, : n + 1] + other.coeffs[: n + 1, : n + 1])

    def __sub__(self, other: "PowerSeries2") -> "PowerSeries2":
        n = min(self.order, other.order)
        return PowerSeries2(self.coeffs[: n + 1, : n + 1] - other.coeffs[: n + 1, : n + 1])

    def __mul__(self, other) -> "PowerSeries2":
        if isinstance(other, PowerSeries2):
            n = min(self.order, other.order)
            a = self.coeffs[: n + 1, : n + 1]
            b = other.coeffs[: n + 1, : n + 1]
            prod = convolve2d(a, b)  # direct method: exact sums of products
            return PowerSeries2(prod[: n + 1, : n + 1])
        return self.scale(other)

    def __rmul__(self, scalar) -> "PowerSeries2":
        return self.scale(scalar)

    def __neg__(self) -> "PowerSeries2":
        return PowerSeries2(-self.coeffs)

    def scale(self, scalar) -> "PowerSeries2":
        return PowerSeries2(self.coeffs * complex(scalar))

    def diff(self, var: str) -> "PowerSeries2":
        """Formal partial derivative; order drops by one."""
        n = self.order
        if n == 0:
            return PowerSeries2.zero(0)
        if var == "z":
            j = np.arange(1, n + 1)[:, None]
            return PowerSeries2(self.coeffs[1:, :n] * j)
        if var == "w":
            k = np.arange(1, n + 1)[None, :]
            return PowerSeries2(self.coeffs[:n, 1:] * k)
        raise ValueError(f"var must be 'z' or 'w', got {var!r}")

    def diagonal(self) -> PowerSeries1:
        """Diagonal restriction ``f(z, z)``: antidiagonal coefficient sums."""
        n = self.order
        flipped = self.coeffs[:, ::-1]
        out = np.array([np.trace(flipped, offset=n - l) for l in range(n + 1)])
        return PowerSeries1(out)

    def log(self) -> "PowerSeries2":
        """Bivariate ``log``; solved row-by-row in the ``z`` index.

        Row 0 is the univariate log of the ``w``-slice at ``z = 0``; each
        further row solves the convolution identity from ``d/dz a = (d/dz L) a``
        against the reciprocal of the ``z = 0`` slice.
        """
        a = self.coeffs
        if abs(a[0, 0] - 1.0) > TOL_CONST:
            raise ValueError(f"log requires unit constant term, got {a[0, 0]}")
        n = self.order
        out = np.zeros((n + 1, n + 1), dtype=np.complex128)
        out[0, :] = PowerSeries1(a[0, :]).log().coeffs
        recip0 = PowerSeries1(a[0, :]).reciprocal().coeffs
        for j in range(1, n + 1):
            rhs = a[j, :].copy()
            for p in range(1, j):
                rhs -= (p / j) * np.convolve(out[p, :], a[j - p, :])[: n + 1]
            out[j, :] = np.convolve(rhs, recip0)[: n + 1]
        return PowerSeries2(out)

    def exp(self) -> "PowerSeries2":
        """Bivariate ``exp`` via the forward recursion (inverse of :meth:`log`)."""
        a = self.coeffs
        n = self.order
        out = np.zeros((n + 1, n + 1), dtype=np.complex128)
        out[0, :] = PowerSeries1(a[0, :]).exp().coeffs
        for j in range(1, n + 1):
            acc = np.zeros(n + 1, dtype=np.complex128)
            for p in range(1, j + 1):
                acc += p * np.convolve(a[p, :], out[j - p, :])[: n + 1]
            out[j, :] = acc / j
        return PowerSeries2(out)

    def eval(self, z, w):
        """Evaluate at (broadcastable) complex arguments."""
        z = np.asarray(z, dtype=np.complex128)
        w = np.asarray(w, dtype=np.complex128)
        # Horner in z over rows, each row Horner'd in w.
        rows = np.empty((self.order + 1,) + w.shape, dtype=np.complex128)
        for j in range(self.order + 1):
            rows[j] = PowerSeries1(self.coeffs[j]).eval(w)
        out = rows[-1]
        for j in range(self.order - 1, -1, -1):
            out = out * z + rows[j]
        return out if np.asarray(out).shape else complex(out)


def divided_difference(phi: PowerSeries1) -> PowerSeries2:
    """Exact coefficient form of ``(phi(z) - phi(w)) / (z - w)``.

    ``sum_n a_n (z**n - w**n)/(z - w) = sum_n a_n sum_{i+j=n-1} z**i w**j``;
    no division is performed.  Output order is ``phi.order - 1``; grid entries
    of total degree above that are identically zero.
    """
    n = phi.order
    if n == 0:
        return PowerSeries2.zero(0)
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n - i):
            out[i, j] = phi.coeffs[i + j + 1]
    return PowerSeries2(out)


def _antidiagonal_sums(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.shape[0] - 1
    flipped = coeffs[:, ::-1]
    return np.array([np.trace(flipped, offset=n - l) for l in range(2 * n + 1)])


def divide_by_vanishing_factor(f: PowerSeries2, factor: str, tol: float = TOL_DIV) -> PowerSeries2:
    """Exact coefficient-level quotient ``f / factor`` for factor in {z-w, z, w}.

    The input must vanish on the factor's zero set (within ``tol`` relative to
    the largest input coefficient): for ``z`` (resp. ``w``) the first row
    (resp. column) of coefficients, for ``z - w`` the antidiagonal sums, i.e.
    the coefficients of the diagonal restriction.  The quotient times the
    factor reproduces ``f`` on the common grid; a violation signals a
    malformed (non-divisible) input.
    """
    c = f.coeffs
    n = f.order
    scale = max(1.0, float(np.max(np.abs(c))))
    if n == 0:
        raise ValueError("cannot divide an order-0 series by a vanishing factor")
    if factor == "z":
        if np.max(np.abs(c[0, :])) > tol * scale:
            raise ValueError("series does not vanish on z = 0; not divisible by z")
        return PowerSeries2(c[1:, :n])
    if factor == "w":
        if np.max(np.abs(c[:, 0])) > tol * scale:
            raise ValueError("series does not vanish on w = 0; not divisible by w")
        return PowerSeries2(c[:n, 1:])
    if factor != "z-w":
        raise ValueError(f"factor must be one of 'z-w', 'z', 'w', got {factor!r}")

    diag = _antidiagonal_sums(c)
    if np.max(np.abs(diag)) > tol * scale:
        raise ValueError("series does not vanish on the diagonal z = w; not divisible by z - w")
    h = np.zeros((n, n), dtype=np.complex128)
    # (z - w) * h has coefficient h[a-1, b] - h[a, b-1] at (a, b); solve along
    # antidiagonals of h from the z-edge, reading h entries outside the grid
    # as zero (polynomial convention).
    for s in range(2 * n - 1):
        for a in range(min(s, n - 1), max(-1, s - n), -1):
            b = s - a
            above = h[a + 1, b - 1] if (a + 1 <= n - 1 and b - 1 >= 0) else 0.0
            h[a, b] = c[a + 1, b] + above
    # Consistency: the quotient must reproduce f on the full input grid.
    prod = np.zeros_like(c)
    prod[1:, :n] += h
    prod[:n, 1:] -= h
    if np.max(np.abs(prod - c)) > tol * scale:
        raise ValueError("quotient does not reproduce the input; not divisible by z - w")
    return PowerSeries2(h)


def log_one_over_one_minus(order: int) -> PowerSeries1:
    """``log(1/(1-z)) = sum_{j>=1} z**j / j`` truncated at ``order``."""
    c = np.zeros(order + 1, dtype=np.complex128)
    j = np.arange(1, order + 1)
    c[1:] = 1.0 / j
    return PowerSeries1(c)


def log_dirichlet_kernel(order: int) -> PowerSeries2:
    """``log(1/(1 - z w)) = sum_{l>=1} (z w)**l / l`` truncated at ``order``."""
    c = np.zeros((order + 1, order + 1), dtype=np.complex128)
    l = np.arange(1, order + 1)
    c[l, l] = 1.0 / l
    return PowerSeries2(c)
