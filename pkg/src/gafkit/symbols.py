"""Dirichlet operator symbols of contractions.

The symbol of a finite contraction matrix is the bivariate series

    W(z, w) = sum_{j,k >= 1} e_j(z) e_k(w) m_{jk},      e_j(z) = z**j / sqrt(j),

where ``m_{jk}`` is the stored matrix datum under the index convention of
:mod:`gafkit.gaf` (row ``k``, column ``j``).  With that convention the symbol
of a coupling's matrix coincides coefficient-for-coefficient with the exact
analytic correlation of the coupled pair, which is the transfer property this
module exists to exhibit.

Also here: the change of basis induced by a disk automorphism (unitarily
conjugating the operator, preserving its norm), the resulting diagonal-symbol
transformation identity, and the two-function construction showing diagonal
symbols of bounded operators escape the Bloch space.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .gaf import GafCoupling
from .linalg import ContractionMatrix, operator_norm
from .reports import BoundReport
from .series import PowerSeries1, PowerSeries2


@dataclass(frozen=True)
class DirichletSymbol:
    """Symbol ``W`` with its diagonal restriction and the source norm."""

    W: PowerSeries2
    diag: PowerSeries1
    source_norm: float

    def __post_init__(self):
        edge = max(
            float(np.max(np.abs(self.W.coeffs[0, :]))),
            float(np.max(np.abs(self.W.coeffs[:, 0]))),
        )
        if edge > 1e-12:
            raise ValueError("symbol must vanish on both axes (W(0,w) = W(z,0) = 0)")


def symbol_from_contraction(a: ContractionMatrix, n: int | None = None) -> DirichletSymbol:
    """Symbol of a finite matrix: coefficient ``(jk)**(-1/2) m_{jk}`` at ``z^j w^k``."""
    if n is None:
        n = a.dim
    if n > a.dim:
        raise ValueError(f"requested order {n} exceeds matrix dimension {a.dim}")
    j = np.arange(1, n + 1)
    weights = 1.0 / np.sqrt(np.outer(j, j))
    coeffs = np.zeros((n + 1, n + 1), dtype=np.complex128)
    coeffs[1:, 1:] = weights * a.entries[:n, :n].T
    w = PowerSeries2(coeffs)
    return DirichletSymbol(W=w, diag=w.diagonal(), source_norm=a.norm_certificate)


def contraction_from_systems(x: np.ndarray, y: np.ndarray, ortho_tol: float = 1e-10) -> ContractionMatrix:
    """Cross-Gram matrix ``<x_j, y_k>`` of two orthonormal column systems.

    Columns of ``x`` and of ``y`` must each be orthonormal (within
    ``ortho_tol``); the result is then automatically a contraction, being a
    product of two partial isometries.  Entry (row k, column j) is
    ``<x_j, y_k>``, matching the stored-matrix convention.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != y.shape:
        raise ValueError("systems must have matching shapes")
    for name, m in (("x", x), ("y", y)):
        gram = m.conj().T @ m
        if np.max(np.abs(gram - np.eye(m.shape[1]))) > ortho_tol:
            raise ValueError(f"columns of {name} are not orthonormal within {ortho_tol}")
    return ContractionMatrix.from_entries(y.conj().T @ x)


def coupling_from_contraction(t: ContractionMatrix) -> GafCoupling:
    """Coupled pair whose analytic correlation is the symbol of ``t``.

    Round-trip contract: ``exact_analytic_correlation(coupling_from_contraction(t))``
    equals ``symbol_from_contraction(t).W`` coefficient for coefficient.
    """
    return GafCoupling.analytic_contraction(t.require_contraction())


# ---------------------------------------------------------------------------
# Moebius transformations


@dataclass(frozen=True)
class MobiusMap:
    """Disk automorphism ``phi(z) = e^{i theta} (a - z) / (1 - conj(a) z)``."""

    a: complex
    theta: float = 0.0

    def __post_init__(self):
        if abs(self.a) >= 1.0:
            raise ValueError("|a| must be < 1")

    @property
    def phase(self) -> complex:
        return complex(np.exp(1j * self.theta))

    def __call__(self, z):
        return self.phase * (self.a - np.asarray(z)) / (1.0 - np.conj(self.a) * np.asarray(z))

    def series(self, order: int) -> PowerSeries1:
        """Taylor coefficients on the disk (geometric, closed form)."""
        abar = np.conj(self.a)
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = self.phase * self.a
        if order >= 1:
            m = np.arange(1, order + 1)
            c[1:] = self.phase * (abs(self.a) ** 2 - 1.0) * abar ** (m - 1)
        return PowerSeries1(c)

    def derivative_series(self, order: int) -> PowerSeries1:
        """``phi'(z) = e^{i theta}(|a|^2 - 1)/(1 - conj(a) z)**2`` as a series."""
        abar = np.conj(self.a)
        m = np.arange(0, order + 1)
        c = self.phase * (abs(self.a) ** 2 - 1.0) * (m + 1) * abar**m
        return PowerSeries1(c)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """The automorphism ``self o other``, renormalized to (a, theta) form."""
        # Matrix of z -> (A z + B)/(C z + D) for each factor, then product.
        m1 = np.array([[-self.phase, self.phase * self.a], [-np.conj(self.a), 1.0]])
        m2 = np.array([[-other.phase, other.phase * other.a], [-np.conj(other.a), 1.0]])
        a_, b_, c_, d_ = (m1 @ m2).ravel()
        zero = -b_ / a_  # composed map vanishes here; |A| >= 1 - |a1||a2| > 0
        # phi'(0) = e^{i theta}(|a|^2 - 1) identifies the phase without branching.
        phase = (a_ * d_ - b_ * c_) / (d_ * d_ * (abs(zero) ** 2 - 1.0))
        return MobiusMap(a=complex(zero), theta=float(np.angle(phase)))


def _basis_expansion_matrix(phi: MobiusMap, rows: int, order: int) -> np.ndarray:
    """Coefficients of ``phi' * f_l(phi)`` in the basis ``f_j = sqrt(j) z^{j-1}``.

    Returns ``d`` of shape (rows, order) with ``phi'(z) f_l(phi(z)) =
    sum_j d[l-1, j-1] f_j(z)`` truncated at ``z**(order-1)``; exact for the
    returned columns because multiplication only feeds downward in degree.
    """
    phi_s = phi.series(order - 1).coeffs  # length `order`
    dphi = phi.derivative_series(order - 1).coeffs
    d = np.empty((rows, order), dtype=np.complex128)
    power = np.zeros(order, dtype=np.complex128)
    power[0] = 1.0  # phi**0
    j = np.arange(1, order + 1)
    for l in range(1, rows + 1):
        coeff = np.convolve(dphi, power)[:order]  # phi' * phi**(l-1)
        d[l - 1] = np.sqrt(l) * coeff / np.sqrt(j)
        power = np.convolve(power, phi_s)[:order]
    return d


def mobius_conjugate(
    t: ContractionMatrix,
    phi: MobiusMap,
    working_order: int | None = None,
    out_dim: int | None = None,
    tail_cap: float = 1e-6,
) -> tuple[ContractionMatrix, float]:
    """Matrix of the norm-preserving conjugation of ``t`` by ``phi``.

    The conjugated operator's matrix block of side ``working_order`` is exact;
    compressing to ``out_dim`` (default: dim of ``t``) drops basis mass, and
    the returned tail estimate ``2 ||t|| * sqrt(sum_l dropped mass of row l)``
    bounds both the norm change and pointwise symbol error that compression
    can introduce.  Raises when the working order leaves more than
    ``tail_cap`` unresolved at full order, i.e. when headroom is too small.
    """
    n = t.dim
    if working_order is None:
        working_order = 4 * n
    if working_order < 2 * n:
        raise ValueError("working order must be at least twice the matrix dimension")
    if out_dim is None:
        out_dim = n
    if out_dim > working_order:
        raise ValueError("out_dim cannot exceed the working order")

    d = _basis_expansion_matrix(phi, n, working_order)
    # Unresolved mass at full working order; rows are unit vectors in the limit.
    full_defect = np.clip(1.0 - np.sum(np.abs(d) ** 2, axis=1), 0.0, None)
    full_tail = 2.0 * t.norm_certificate * float(np.sqrt(np.sum(full_defect)))
    if full_tail > tail_cap:
        raise ValueError(
            f"working order {working_order} leaves tail {full_tail:.3e} > {tail_cap:.1e}; "
            "increase the headroom"
        )
    # Symbol-ordered datum g[j-1, k-1] = m_{jk} is the transpose of storage;
    # the conjugated datum is d^T g d, and transposing back gives the same
    # sandwich on the stored matrix directly.
    stored_new = d.T @ t.entries @ d
    block = stored_new[:out_dim, :out_dim]
    out_defect = np.clip(1.0 - np.sum(np.abs(d[:, :out_dim]) ** 2, axis=1), 0.0, None)
    tail = 2.0 * t.norm_certificate * float(np.sqrt(np.sum(out_defect)))
    return ContractionMatrix.from_entries(block), tail


def diag_symbol_tail(norm: float, z: complex, order: int) -> float:
    """Bound for the diagonal-symbol mass beyond ``order`` for a norm-``norm`` operator."""
    az2 = abs(z) ** 2
    full = -np.log1p(-az2)
    dropped = az2 ** (order + 1) / ((order + 1) * (1.0 - az2))
    return 2.0 * norm * float(np.sqrt(full) * np.sqrt(dropped))


def verify_mobius_identity(
    t: ContractionMatrix,
    phi: MobiusMap,
    points,
    working_order: int | None = None,
    base_tol: float = 1e-6,
) -> BoundReport:
    """Check the diagonal-symbol transformation law at sample points.

    Left side: diagonal symbol of the conjugated operator, from the exact
    block at the working order.  Right side: the combination

        diag(W)(phi(z)) - W(phi(z), phi(0)) - W(phi(0), phi(z)) + diag(W)(phi(0))

    computed from the *original* finite matrix, which is exact.  The per-point
    tolerance is ``base_tol`` plus the computed truncation tail of the left
    side.
    """
    n = t.dim
    if working_order is None:
        working_order = 4 * n
    t_phi, _ = mobius_conjugate(t, phi, working_order=working_order, out_dim=working_order)
    sym_phi = symbol_from_contraction(t_phi)
    sym = symbol_from_contraction(t)
    phi0 = complex(phi(0.0))
    report = BoundReport(
        suite="symbols.mobius_identity",
        params={"dim": n, "working_order": working_order, "a": str(phi.a), "theta": phi.theta},
    )
    for z in np.asarray(points, dtype=np.complex128).ravel():
        pz = complex(phi(z))
        lhs = sym_phi.diag.eval(z)
        rhs = (
            sym.diag.eval(pz)
            - sym.W.eval(pz, phi0)
            - sym.W.eval(phi0, pz)
            + sym.diag.eval(phi0)
        )
        tol = base_tol + diag_symbol_tail(t.norm_certificate, z, working_order)
        report.add(label=f"identity(z={z})", lhs=abs(lhs - rhs), rhs=0.0, tol=tol)
    return report


# ---------------------------------------------------------------------------
# The mock-Bloch construction


def _mp_log1m(x):
    return -mp.log1p(-x)


@dataclass(frozen=True)
class MockBlochData:
    """Certified data of the two-function construction.

    ``lam[j]`` is ``-log(1 - r_j)``; the radii approach 1 far too fast for
    double precision, so everything downstream of the radii is evaluated in
    mpmath.  ``bloch_lower[l]`` is the certified lower bound
    ``l**(-2) sqrt(log 1/(1 - r_l**2))`` for the Bloch seminorm witness
    ``(1 - r_l**2) f'(r_l) g(r_l)``, whose exact double-sum value is
    ``bloch_value[l]``.
    """

    lam: list
    dirichlet_f: float
    dirichlet_g: float
    bloch_value: list
    bloch_lower: list
    condition_margins: list
    f_coeffs: np.ndarray
    g_coeffs: np.ndarray


def _sparseness_margins(lams) -> list:
    """Margins (>= 0 means satisfied) of the two sparseness conditions.

    With ``t_j = 1 - r_j`` the conditions couple every pair (j, k):

    * ``log 1/(1 - r_j r_k) <= 2**(-|j-k|) sqrt(log 1/(1-r_j^2)) sqrt(log 1/(1-r_k^2))``
    * ``(1-r_j^2)(1-r_k^2) / (1 - r_j r_k)**2 <= 2**(-|j-k|)``
    """
    margins = []
    n = len(lams)
    rs = [1 - mp.exp(-lam) for lam in lams]
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            rj, rk = rs[j], rs[k]
            one_minus_prod = 1 - rj * rk
            lhs1 = -mp.log(one_minus_prod)
            rhs1 = mp.mpf(2) ** (-abs(j - k)) * mp.sqrt(_mp_log1m(rj**2) * _mp_log1m(rk**2))
            lhs2 = (1 - rj**2) * (1 - rk**2) / one_minus_prod**2
            rhs2 = mp.mpf(2) ** (-abs(j - k))
            margins.append(float(rhs1 - lhs1))
            margins.append(float(rhs2 - lhs2))
    return margins


def mock_bloch_construct(levels: int, sharpen: float = 2.0, coeff_order: int = 64) -> MockBlochData:
    """Greedy construction of the two-function Bloch-escape witness.

    Radii are chosen in the variable ``lam = -log(1 - r)``: each new level
    takes the smallest lam (on a 1e-3 grid) satisfying both sparseness
    conditions against all earlier levels, then multiplies it by ``sharpen``
    for safety margin; both conditions are re-verified exactly (mpmath) at the
    chosen value.  Radii this deep in the disk underflow double precision,
    which is the point: the Bloch lower bounds grow without bound while both
    Dirichlet double sums stay finite.
    """
    if levels < 2:
        raise ValueError("levels must be >= 2")
    if sharpen < 1.0:
        raise ValueError("sharpen must be >= 1")
    with mp.workdps(60):
        lams = [mp.mpf(3)]  # r_1 = 1 - e^-3 ~ 0.95
        for _ in range(2, levels + 1):
            step = mp.mpf("1e-3")
            for i in range(200):
                lam = lams[-1] + step * (2**i)  # geometric scan, then refine
                if min(_sparseness_margins(lams + [lam])) >= 0:
                    break
            else:
                raise RuntimeError("growth policy failed to satisfy sparseness conditions")
            # binary refinement down to the 1e-3 grid for the minimal admissible lam
            lo, hi = lams[-1], lam
            while hi - lo > step:
                mid = (lo + hi) / 2
                if min(_sparseness_margins(lams + [mid])) >= 0:
                    hi = mid
                else:
                    lo = mid
            lams.append(hi * sharpen)
        if min(_sparseness_margins(lams)) < 0:
            raise RuntimeError("sharpened radii violate a sparseness condition")

        rs = [1 - mp.exp(-lam) for lam in lams]
        lam_tilde = [_mp_log1m(r**2) for r in rs]

        # Dirichlet seminorms: closed-form double sums from the construction.
        dir_f = mp.mpf(0)
        dir_g = mp.mpf(0)
        for j in range(levels):
            for k in range(levels):
                jj, kk = j + 1, k + 1
                omp = 1 - rs[j] * rs[k]
                dir_f += (1 - rs[j] ** 2) * (1 - rs[k] ** 2) / (jj * kk * omp**2)
                dir_g += _mp_log1m(rs[j] * rs[k]) / (jj * kk * mp.sqrt(lam_tilde[j] * lam_tilde[k]))

        # Bloch witness values (1 - r_l^2) f'(r_l) g(r_l), exact double sums.
        bloch_value = []
        bloch_lower = []
        for l in range(levels):
            rl = rs[l]
            total = mp.mpf(0)
            for j in range(levels):
                for k in range(levels):
                    jj, kk = j + 1, k + 1
                    total += (
                        (1 - rl**2)
                        * (1 - rs[j] ** 2)
                        / (jj * kk * (1 - rs[j] * rl) ** 2)
                        * _mp_log1m(rs[k] * rl)
                        / mp.sqrt(lam_tilde[k])
                    )
            bloch_value.append(float(total))
            bloch_lower.append(float(mp.sqrt(lam_tilde[l]) / (l + 1) ** 2))

        # Taylor coefficients of f and g for the rank-one symbol check;
        # levels beyond double-precision range contribute exact zeros.
        f_coeffs = np.zeros(coeff_order + 1)
        g_coeffs = np.zeros(coeff_order + 1)
        for j in range(levels):
            jj = j + 1
            rj = float(rs[j])
            wf = float((1 - rs[j] ** 2)) / jj
            wg = float(1 / mp.sqrt(lam_tilde[j])) / jj
            for m in range(1, coeff_order + 1):
                f_coeffs[m] += wf * rj ** (m - 1)
                g_coeffs[m] += wg * rj**m / m
        margins = _sparseness_margins(lams)

    return MockBlochData(
        lam=[float(x) for x in lams],
        dirichlet_f=float(dir_f),
        dirichlet_g=float(dir_g),
        bloch_value=bloch_value,
        bloch_lower=bloch_lower,
        condition_margins=margins,
        f_coeffs=f_coeffs,
        g_coeffs=g_coeffs,
    )


def rank_one_symbol_from_functions(f_coeffs: np.ndarray, g_coeffs: np.ndarray) -> DirichletSymbol:
    """Symbol of the rank-one operator whose diagonal symbol is ``z^2 f g``.

    The operator is ``h -> <h, conj((z g)')> (z f)'``; its stored matrix datum
    is ``(jk)**(-1/2) (j g_{j-1}) (k f_{k-1})``, a rank-one grid.
    """
    order = min(len(f_coeffs), len(g_coeffs)) - 1
    j = np.arange(1, order + 1)
    u = j * np.asarray(f_coeffs[:order], dtype=np.complex128)  # k f_{k-1}
    v = j * np.asarray(g_coeffs[:order], dtype=np.complex128)  # j g_{j-1}
    stored = np.outer(u, v) / np.sqrt(np.outer(j, j))  # row k, column j
    mat = ContractionMatrix.from_entries(stored)
    return symbol_from_contraction(mat)
