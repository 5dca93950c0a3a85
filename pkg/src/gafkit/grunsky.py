"""Grunsky operators of normalized univalent maps.

For a univalent ``phi`` with ``phi(0) = 0``, ``phi'(0) = 1`` the associated
symbol is

    Q(z, w) = log[ z w (phi(z) - phi(w)) / ((z - w) phi(z) phi(w)) ]
            = log dd(phi) - log(phi(z)/z) - log(phi(w)/w),

where ``dd`` is the exact divided difference; each log argument has unit
constant term so the computation is pure coefficient recursion, no division.
The symbol is symmetric, vanishes on both axes, and its coefficient matrix
``sqrt(jk) Q_{jk}`` is a contraction exactly when the map is univalent (the
Grunsky inequalities).  A symbol of this form is characterized among all
axis-vanishing symbols by a nonlinear wave equation; the residual of that
equation and the inverse construction (map from symbol) are implemented here.

Truncation contract: producing the symbol exactly on the full square grid of
order ``N`` consumes map coefficients through order ``2N + 1``, because the
square grid reaches total degree ``2N``.  Constructors take the order
explicitly so catalog maps can be generated with whatever headroom a caller
needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ContractionMatrix, operator_norm
from .series import PowerSeries1, PowerSeries2, divide_by_vanishing_factor, divided_difference


@dataclass(frozen=True)
class ConformalMap:
    """Normalized univalent-map candidate: ``c_0 = 0`` and ``c_1 = 1`` exactly."""

    series: PowerSeries1
    name: str = "custom"

    def __post_init__(self):
        c = self.series.coeffs
        if self.series.order < 1 or c[0] != 0 or c[1] != 1:
            raise ValueError("map must satisfy c_0 = 0 and c_1 = 1 exactly")

    @staticmethod
    def identity(order: int) -> "ConformalMap":
        c = np.zeros(order + 1, dtype=np.complex128)
        c[1] = 1.0
        return ConformalMap(PowerSeries1(c), name="identity")

    @staticmethod
    def koebe(order: int) -> "ConformalMap":
        """``z/(1-z)**2 = sum_n n z**n``."""
        c = np.arange(order + 1, dtype=np.complex128)
        return ConformalMap(PowerSeries1(c), name="koebe")

    @staticmethod
    def cayley_like(param: complex, order: int) -> "ConformalMap":
        """``z/(1 - c z)``, univalent for |c| <= 1."""
        n = np.arange(order + 1)
        c = np.zeros(order + 1, dtype=np.complex128)
        c[1:] = np.asarray(param, dtype=np.complex128) ** (n[1:] - 1)
        return ConformalMap(PowerSeries1(c), name=f"cayley_like({param})")

    @staticmethod
    def from_coefficients(coeffs, name: str = "custom") -> "ConformalMap":
        return ConformalMap(PowerSeries1(coeffs), name=name)


@dataclass(frozen=True)
class GrunskySymbol:
    """Symmetric bivariate symbol vanishing on both axes."""

    Q: PowerSeries2
    source: str = "custom"

    def __post_init__(self):
        c = self.Q.coeffs
        scale = max(1.0, float(np.max(np.abs(c))))
        edge = max(float(np.max(np.abs(c[0, :]))), float(np.max(np.abs(c[:, 0]))))
        if edge > 1e-10 * scale:
            raise ValueError("symbol must vanish on both axes")
        if not self.Q.is_symmetric(tol=1e-10 * scale):
            raise ValueError("symbol must be symmetric")


def grunsky_symbol(phi: ConformalMap, n: int) -> GrunskySymbol:
    """Symbol of the map, exact on the full square grid of order ``n``.

    Requires map coefficients through order ``2n + 1`` (the grid's largest
    total degree plus the divided-difference shift).
    """
    if phi.series.order < 2 * n + 1:
        raise ValueError(
            f"map order {phi.series.order} insufficient for symbol order {n}; need {2*n+1}"
        )
    work = 2 * n
    dd = divided_difference(phi.series.truncate(work + 1))  # order 2n, constant term 1
    log_dd = dd.log()
    # phi(z)/z as a unit-constant-term univariate series, of order 2n
    u = PowerSeries1(phi.series.coeffs[1 : work + 2])
    log_u = u.log().coeffs
    q = np.array(log_dd.coeffs[: n + 1, : n + 1])
    q[0, :] -= log_u[: n + 1]
    q[:, 0] -= log_u[: n + 1]
    # The axis rows vanish analytically; zero the float residue so downstream
    # divisibility checks see exact zeros.
    q[0, :] = 0.0
    q[:, 0] = 0.0
    q = (q + q.T) / 2.0
    return GrunskySymbol(PowerSeries2(q), source=phi.name)


def grunsky_matrix(phi: ConformalMap, n: int) -> ContractionMatrix:
    """Matrix ``sqrt(jk) Q_{jk}`` (stored convention), with norm certificate.

    For genuinely univalent maps the norm is at most 1; non-univalent inputs
    may exceed it, which is reported through the certificate rather than
    raised.
    """
    q = grunsky_symbol(phi, n).Q.coeffs
    j = np.arange(1, n + 1)
    stored = np.sqrt(np.outer(j, j)) * q[1:, 1:].T  # row k, column j
    return ContractionMatrix.from_entries(stored)


def diagonal_symbol(phi: ConformalMap, n: int) -> PowerSeries1:
    """``log(z**2 phi'(z) / phi(z)**2)`` computed independently of the symbol."""
    if phi.series.order < n + 1:
        raise ValueError("map order insufficient")
    dphi = phi.series.diff()  # order - 1 >= n
    u = PowerSeries1(phi.series.coeffs[1:])  # phi/z, unit constant term
    ratio = dphi.truncate(n) * (u.truncate(n) * u.truncate(n)).reciprocal()
    return ratio.log()


def nlw_residual(sym: GrunskySymbol) -> PowerSeries2:
    """Residual of the nonlinear wave equation, valid through total degree N-2.

    ``residual = d_z d_w Q + (d_z Q)(d_w Q) - (z^2 d_z Q - w^2 d_w Q)/(z w (z - w))``.

    The last term is computed by exact coefficient division: the numerator is
    divisible by ``z`` and ``w`` because the symbol vanishes on the axes, and
    the remaining factor is antisymmetric (by symmetry of ``Q``), hence
    divisible by ``z - w``.  A symbol truncated at order ``N`` determines the
    residual only through total degree ``N - 2``; grid entries beyond that
    antidiagonal are reported as zero.
    """
    q = sym.Q
    n = q.order
    if n < 3:
        raise ValueError("symbol order too small for a residual")
    qz = q.diff("z")  # order n-1
    qw = q.diff("w")
    term1 = qz.diff("w")  # d_z d_w Q, order n-2
    term2 = qz * qw  # order n-1

    # z^2 d_z Q - w^2 d_w Q on a grid of order n+1, exactly.
    c = q.coeffs
    u = np.zeros((n + 2, n + 2), dtype=np.complex128)
    a = np.arange(n + 2)[:, None]
    b = np.arange(n + 2)[None, :]
    # coefficient of z^a w^b: (a-1) Q_{a-1,b} - (b-1) Q_{a,b-1}
    u[1:, : n + 1] += (a[1:] - 1) * c
    u[: n + 1, 1:] -= (b[:, 1:] - 1) * c
    numer = PowerSeries2(u)
    v = divide_by_vanishing_factor(divide_by_vanishing_factor(numer, "z"), "w")  # order n-1
    term3 = divide_by_vanishing_factor(v, "z-w")  # order n-2

    res = term1 + term2 - term3  # truncates to order n-2
    out = np.array(res.coeffs)
    # entries beyond total degree n-2 are not determined at this truncation
    mask = (np.arange(n - 1)[:, None] + np.arange(n - 1)[None, :]) > n - 2
    out[mask] = 0.0
    return PowerSeries2(out)


def reconstruct_map(sym: GrunskySymbol, residual_tol: float = 1e-8) -> ConformalMap:
    """Map with the given symbol, pinned to the canonical representative.

    The symbol determines the map only modulo the reparameterization
    ``phi -> phi/(1 + c phi)`` (which translates the exterior auxiliary map by
    ``c`` and leaves the symbol untouched); the representative produced here
    is the one with vanishing second coefficient, i.e. integration constant
    zero for the exterior chart.  Round-trip contract:
    ``grunsky_symbol(reconstruct_map(Q), n)`` reproduces ``Q`` at matching
    orders.

    Construction: on the exterior chart the diagonal symbol exponentiates to
    the derivative of the auxiliary map, ``psi'(xi) = exp(diag Q (1/xi))``;
    integrate (no constant), inverse the chart, and read off the disk map
    ``phi(z) = 1/psi(1/z) = z / p(z)``.
    """
    res = nlw_residual(sym)
    worst = float(np.max(np.abs(res.coeffs)))
    if worst > residual_tol:
        raise ValueError(
            f"wave-equation residual {worst:.3e} exceeds {residual_tol:.1e}; "
            "input is not a univalent-map symbol"
        )
    diag = sym.Q.diagonal()  # q_l z^l with q_0 = q_1 = 0
    n = diag.order
    e = diag.exp().coeffs  # coefficients of exp(diag) in the chart variable
    # psi(xi) = xi + sum_{m>=2} e_m xi^(1-m)/(1-m); p(z) = z * psi(1/z)
    p = np.zeros(n + 1, dtype=np.complex128)
    p[0] = 1.0
    m = np.arange(2, n + 1)
    p[m] = e[m] / (1.0 - m)
    phi = np.convolve(
        np.concatenate(([0.0], [1.0])), PowerSeries1(p).reciprocal().coeffs
    )[: n + 2]
    return ConformalMap(PowerSeries1(phi), name=f"reconstructed({sym.source})")


def canonical_normalize(phi: ConformalMap) -> ConformalMap:
    """The symbol-class representative with vanishing second coefficient.

    ``phi/(1 + c phi)`` with ``c = [z^2] phi`` has the same symbol and is what
    :func:`reconstruct_map` produces.
    """
    c2 = phi.series.coeffs[2] if phi.series.order >= 2 else 0.0
    denom = PowerSeries1(
        np.concatenate(([1.0], (c2 * phi.series.coeffs[1:]).ravel()))
    )
    out = phi.series * denom.reciprocal()
    return ConformalMap(out, name=f"canonical({phi.name})")


CATALOG = ("identity", "koebe", "cayley_0.3", "cayley_0.7i", "perturbed")


def catalog_map(name: str, order: int) -> ConformalMap:
    """The certified-univalent test catalog."""
    if name == "identity":
        return ConformalMap.identity(order)
    if name == "koebe":
        return ConformalMap.koebe(order)
    if name == "cayley_0.3":
        return ConformalMap.cayley_like(0.3, order)
    if name == "cayley_0.7i":
        return ConformalMap.cayley_like(0.7j, order)
    if name == "perturbed":
        c = np.zeros(order + 1, dtype=np.complex128)
        c[1] = 1.0
        if order >= 2:
            c[2] = 0.1
        return ConformalMap(PowerSeries1(c), name="perturbed")
    raise ValueError(f"unknown catalog map {name!r}")
