"""Finite-truncation model of a coupled pair of disk Gaussian analytic functions.

The base process is ``Phi(z) = sum_{j>=1} alpha_j z**j / sqrt(j)`` with i.i.d.
standard complex Gaussian coefficients; a second copy ``Psi`` built from
coefficients ``beta_k`` may carry correlations with the first.  A
:class:`GafCoupling` pins the joint law at truncation ``N`` through the two
target cross-covariance tables

* ``E alpha_j beta_k``        (analytic coupling),
* ``E alpha_j conj(beta_k)``  (sesquianalytic coupling),

of which exactly one is nonzero per mode; the other contracts
(``E beta_j conj(beta_k) = delta_jk``, ``E beta_j beta_k = 0``) are restored
by a defect completion against an auxiliary i.i.d. Gaussian vector when
sampling.

Index convention, used by every consumer: the stored target matrix has
``E alpha_j beta_k`` at row ``k-1``, column ``j-1`` (and likewise for the
conjugated table).  The symbol construction in :mod:`gafkit.symbols` reads
these matrices untransposed, which is what makes the correlation/symbol
round trip exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ContractionMatrix, RngStream, haar_unitary, psd_check, psd_sqrt
from .reports import BoundReport
from .series import PowerSeries2

MODES = (
    "identical",
    "independent",
    "conjugate_reflect",
    "permutation",
    "analytic_contraction",
    "sesquianalytic_contraction",
)


@dataclass(frozen=True)
class GafCoupling:
    """Joint law of a coupled pair at truncation ``N`` (indices 1..N)."""

    trunc: int
    mode: str
    perm: tuple[int, ...] | None = None
    matrix: ContractionMatrix | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.trunc < 1:
            raise ValueError("trunc must be >= 1")
        if self.mode == "permutation":
            if self.perm is None or sorted(self.perm) != list(range(1, self.trunc + 1)):
                raise ValueError("permutation mode requires a bijection of {1..N}")
        if self.mode in ("analytic_contraction", "sesquianalytic_contraction"):
            if self.matrix is None or self.matrix.dim != self.trunc:
                raise ValueError("contraction mode requires an N x N matrix")
            self.matrix.require_contraction()

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identical(n: int) -> "GafCoupling":
        return GafCoupling(n, "identical")

    @staticmethod
    def independent(n: int) -> "GafCoupling":
        return GafCoupling(n, "independent")

    @staticmethod
    def conjugate_reflect(n: int) -> "GafCoupling":
        return GafCoupling(n, "conjugate_reflect")

    @staticmethod
    def permutation(perm) -> "GafCoupling":
        perm = tuple(int(p) for p in perm)
        return GafCoupling(len(perm), "permutation", perm=perm)

    @staticmethod
    def analytic_contraction(c: ContractionMatrix) -> "GafCoupling":
        return GafCoupling(c.dim, "analytic_contraction", matrix=c)

    @staticmethod
    def sesquianalytic_contraction(e: ContractionMatrix) -> "GafCoupling":
        return GafCoupling(e.dim, "sesquianalytic_contraction", matrix=e)

    # -- target covariance tables -----------------------------------------

    def analytic_target(self) -> np.ndarray:
        """Matrix ``T`` with ``T[k-1, j-1] = E alpha_j beta_k``."""
        n = self.trunc
        if self.mode == "conjugate_reflect":
            return np.eye(n, dtype=np.complex128)
        if self.mode == "permutation":
            t = np.zeros((n, n), dtype=np.complex128)
            for k in range(1, n + 1):
                t[k - 1, self.perm[k - 1] - 1] = 1.0
            return t
        if self.mode == "analytic_contraction":
            return np.array(self.matrix.entries)
        return np.zeros((n, n), dtype=np.complex128)

    def sesquianalytic_target(self) -> np.ndarray:
        """Matrix ``T`` with ``T[k-1, j-1] = E alpha_j conj(beta_k)``."""
        n = self.trunc
        if self.mode == "identical":
            return np.eye(n, dtype=np.complex128)
        if self.mode == "sesquianalytic_contraction":
            return np.array(self.matrix.entries)
        return np.zeros((n, n), dtype=np.complex128)


def _kernel_from_target(target: np.ndarray) -> PowerSeries2:
    n = target.shape[0]
    j = np.arange(1, n + 1)
    weights = 1.0 / np.sqrt(np.outer(j, j))
    coeffs = np.zeros((n + 1, n + 1), dtype=np.complex128)
    coeffs[1:, 1:] = weights * target.T  # (j, k) entry = (jk)^(-1/2) E alpha_j beta_k
    return PowerSeries2(coeffs)


def exact_analytic_correlation(c: GafCoupling) -> PowerSeries2:
    """``E Phi(z) Psi(w)`` as a series in (z, w)."""
    return _kernel_from_target(c.analytic_target())


def exact_sesquianalytic_correlation(c: GafCoupling) -> PowerSeries2:
    """``E Phi(z) conj(Psi(w))`` as a series in (z, v) with v := conj(w)."""
    return _kernel_from_target(c.sesquianalytic_target())


def truncation_tail_variance(z, n: int) -> np.ndarray:
    """Upper bound for the dropped variance ``sum_{j>N} |z|**(2j)/j``."""
    a = np.abs(np.asarray(z, dtype=np.complex128))
    return a ** (2 * (n + 1)) / ((n + 1) * (1.0 - a**2))


def kernel_tail_bound(z: complex, w: complex, n: int) -> float:
    """Bound for the dropped kernel mass ``sum_{j or k > N} (jk)^(-1/2) |z|^j |w|^k``.

    Valid for any coupling since every cross-covariance has modulus <= 1.
    """

    def head(x: float) -> float:
        j = np.arange(1, n + 1)
        return float(np.sum(x**j / np.sqrt(j)))

    def tail(x: float) -> float:
        return x ** (n + 1) / (np.sqrt(n + 1) * (1.0 - x))

    az, aw = abs(z), abs(w)
    return head(az) * tail(aw) + tail(az) * (head(aw) + tail(aw))


# ---------------------------------------------------------------------------
# Sampling


@dataclass(frozen=True)
class SampleBatch:
    """Monte Carlo draws of the coupled pair, evaluated at fixed points.

    ``tail_bound[i]`` bounds the variance lost to truncation at point ``i``.
    The coefficient draws are retained so covariance contracts can be checked
    directly.
    """

    points: np.ndarray
    values_phi: np.ndarray
    values_psi: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    trunc: int
    tail_bound: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.values_phi.shape[0]


def mixing_matrices(c: GafCoupling) -> tuple[np.ndarray, np.ndarray, str]:
    """Return (mix, defect, side) realizing the coupling by linear mixing.

    * analytic side: ``conj(beta) = mix @ alpha + defect @ nu``,
    * sesquianalytic side: ``beta = mix @ alpha + defect @ nu``,

    with ``nu`` i.i.d. standard complex Gaussian independent of ``alpha``.
    Either completion zeroes the complementary correlation table and restores
    the unit covariance of ``beta`` through ``defect = (I - M M*)**(1/2)``.
    """
    n = c.trunc
    t_a = c.analytic_target()
    if np.any(t_a):
        mix = np.conj(t_a)
        side = "analytic"
    else:
        mix = np.conj(c.sesquianalytic_target())
        side = "sesquianalytic"
    d = psd_sqrt(np.eye(n) - mix @ mix.conj().T)
    return mix, d, side


def sample_pair(
    c: GafCoupling, points, n_samples: int, rng: RngStream
) -> SampleBatch:
    """Draw ``n_samples`` of the coupled pair and evaluate at ``points``."""
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if np.any(np.abs(pts) >= 1.0):
        raise ValueError("all evaluation points must lie strictly inside the unit disk")
    n = c.trunc
    mix, dmat, side = mixing_matrices(c)

    alphas = rng.child(0).standard_complex_normal((n_samples, n))
    nus = rng.child(1).standard_complex_normal((n_samples, n))
    mixed = alphas @ mix.T + nus @ dmat.T
    betas = np.conj(mixed) if side == "analytic" else mixed

    j = np.arange(1, n + 1)
    vand = pts[:, None] ** j[None, :] / np.sqrt(j)[None, :]  # (n_points, n)
    values_phi = alphas @ vand.T
    values_psi = betas @ vand.T
    return SampleBatch(
        points=pts,
        values_phi=values_phi,
        values_psi=values_psi,
        alphas=alphas,
        betas=betas,
        trunc=n,
        tail_bound=truncation_tail_variance(pts, n),
    )


def _mean_and_se(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean over axis 0 with jackknife standard error.

    For the plain mean the delete-one jackknife reduces to the classical
    ``s/sqrt(n)``; it is computed through the jackknife formula regardless.
    """
    n = samples.shape[0]
    if n < 2:
        raise ValueError("need at least 2 samples")
    mean = samples.mean(axis=0)
    dev2 = np.abs(samples - mean) ** 2
    var_jack = dev2.sum(axis=0) / (n * (n - 1))
    return mean, np.sqrt(var_jack)


def empirical_correlation(batch: SampleBatch, which: str):
    """Empirical ``E Phi(z_i) Psi(w_j)`` (or conjugated) over all point pairs.

    Returns (estimate, standard_error), each of shape (n_points, n_points);
    entry (i, j) pairs ``z = points[i]`` with ``w = points[j]``.
    """
    if which == "analytic":
        prods = batch.values_phi[:, :, None] * batch.values_psi[:, None, :]
    elif which == "sesquianalytic":
        prods = batch.values_phi[:, :, None] * np.conj(batch.values_psi[:, None, :])
    else:
        raise ValueError(f"which must be 'analytic' or 'sesquianalytic', got {which!r}")
    return _mean_and_se(prods)


def coefficient_covariances(batch: SampleBatch) -> dict:
    """Empirical versions of the four covariance contracts, with standard errors.

    Keys: ``alpha_beta`` (E alpha_j beta_k), ``alpha_beta_conj``
    (E alpha_j conj(beta_k)), ``beta_beta`` (E beta_j beta_k), and
    ``beta_beta_conj`` (E beta_j conj(beta_k)); each value is (estimate, se)
    with entry (k-1, j-1) matching the stored-target convention.
    """
    a, b = batch.alphas, batch.betas
    out = {}
    for key, lhs, rhs in (
        ("alpha_beta", a, b),
        ("alpha_beta_conj", a, np.conj(b)),
        ("beta_beta", b, b),
        ("beta_beta_conj", b, np.conj(b)),
    ):
        prods = lhs[:, None, :] * rhs[:, :, None]  # (samples, k, j)
        out[key] = _mean_and_se(prods)
    return out


# ---------------------------------------------------------------------------
# Exact-kernel checks


def _kernel_value(series: PowerSeries2, z: complex, w: complex) -> complex:
    return series.eval(z, w)


def correlation_table(c: GafCoupling, z: complex, w: complex, analytic_scale: float = 1.0):
    """All cross-covariances of (Phi, conj Phi, Psi, conj Psi) at (z, w).

    Returns the 4x4 block ``E V(z) conj(V(w))^T`` for
    ``V = (Phi, conj Phi, Psi, conj Psi)``.  ``analytic_scale`` multiplies the
    analytic coupling kernel and exists to corrupt the table on purpose in
    tests; a valid Gaussian law requires scale 1.
    """
    n = c.trunc
    t_a = c.analytic_target() * analytic_scale
    t_s = c.sesquianalytic_target()
    kern_a = _kernel_from_target(t_a)
    kern_s = _kernel_from_target(t_s)

    l = np.arange(1, n + 1)

    def k_self(u: complex, v: complex) -> complex:
        # E Phi(u) conj(Phi(v)) = sum_j (u conj(v))**j / j, truncated
        return complex(np.sum((u * np.conj(v)) ** l / l))

    a_zw = _kernel_value(kern_a, z, w)  # E Phi(z) Psi(w)
    a_wz = _kernel_value(kern_a, w, z)  # E Phi(w) Psi(z) = E Psi(z) Phi(w) transposed
    s_zw = _kernel_value(kern_s, z, np.conj(w))  # E Phi(z) conj(Psi(w))
    s_wz = _kernel_value(kern_s, w, np.conj(z))  # E Phi(w) conj(Psi(z))

    phi_phi = k_self(z, w)  # E Phi(z) conj(Phi(w))

    table = np.array(
        [
            [phi_phi, 0.0, s_zw, a_zw],
            [0.0, np.conj(phi_phi), np.conj(a_zw), np.conj(s_zw)],
            [np.conj(s_wz), a_wz, phi_phi, 0.0],
            [np.conj(a_wz), s_wz, 0.0, np.conj(phi_phi)],
        ],
        dtype=np.complex128,
    )
    return table


def corr_matrix_psd_check(
    c: GafCoupling, z: complex, w: complex, tol: float = 1e-8, analytic_scale: float = 1.0
) -> BoundReport:
    """Positive semidefiniteness of the 8x8 covariance of (V(z), V(w))."""
    report = BoundReport(
        suite="gaf.psd",
        params={"mode": c.mode, "trunc": c.trunc, "z": str(z), "w": str(w),
                "analytic_scale": analytic_scale},
    )
    blocks = np.empty((8, 8), dtype=np.complex128)
    zz = correlation_table(c, z, z, analytic_scale)
    zw = correlation_table(c, z, w, analytic_scale)
    ww = correlation_table(c, w, w, analytic_scale)
    blocks[:4, :4] = zz
    blocks[:4, 4:] = zw
    blocks[4:, :4] = zw.conj().T
    blocks[4:, 4:] = ww
    _, smallest = psd_check(blocks, tol)
    report.add(label=f"psd(z={z}, w={w})", lhs=-smallest, rhs=tol, tol=0.0)
    return report


def triangle_bound_check(c: GafCoupling, pairs) -> BoundReport:
    """Pointwise complementarity bound over a grid of (z, w) pairs.

    ``|E Phi(z) conj(Psi(w))| + |E Phi(z) Psi(w)|`` against the geometric mean
    of the two diagonal kernel values; truncation-tail slack enters as the
    check tolerance, so a pass means the truncated left side does not exceed
    the right side by more than what the dropped tail could account for.
    """
    n = c.trunc
    kern_a = exact_analytic_correlation(c)
    kern_s = exact_sesquianalytic_correlation(c)
    report = BoundReport(suite="gaf.triangle", params={"mode": c.mode, "trunc": n})
    for z, w in pairs:
        lhs = abs(_kernel_value(kern_s, z, np.conj(w))) + abs(_kernel_value(kern_a, z, w))
        rhs_val = np.sqrt(
            -np.log1p(-abs(z) ** 2) * -np.log1p(-abs(w) ** 2)
        )
        tail = 2.0 * kernel_tail_bound(z, w, n)
        report.add(label=f"triangle(z={z}, w={w})", lhs=lhs, rhs=float(rhs_val), tol=tail)
    return report


# ---------------------------------------------------------------------------
# Random unitary comparison


@dataclass(frozen=True)
class CueComparison:
    """Empirical log-characteristic-polynomial kernels against the disk limit."""

    points: np.ndarray
    sesqui_emp: np.ndarray
    sesqui_exact: np.ndarray
    analytic_emp: np.ndarray
    sesqui_se: np.ndarray
    analytic_se: np.ndarray

    @property
    def max_sesqui_error(self) -> float:
        return float(np.max(np.abs(self.sesqui_emp - self.sesqui_exact)))

    @property
    def max_analytic_error(self) -> float:
        return float(np.max(np.abs(self.analytic_emp)))


def cue_log_char(n: int, points, n_samples: int, rng: RngStream) -> CueComparison:
    """Sample ``log det(I - z U*)`` for Haar unitaries and compare kernels.

    Each factor ``log(1 - z conj(lambda_i))`` is evaluated on the principal
    branch; since ``|z conj(lambda_i)| < 1`` every factor stays clear of the
    branch cut, and the factors are summed (never the log of the product), so
    no 2*pi*i jumps can occur.  The empirical sesquianalytic kernel is
    compared against ``log 1/(1 - z conj(w))``; the analytic self-correlation
    must vanish in the limit.
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if n < 2:
        raise ValueError("n must be >= 2")
    if np.any(np.abs(pts) > 0.8):
        raise ValueError("grid radius must be <= 0.8")
    values = np.empty((n_samples, pts.size), dtype=np.complex128)
    for s in range(n_samples):
        u = haar_unitary(n, rng.child(s))
        lam = np.linalg.eigvals(u)
        values[s] = np.sum(np.log(1.0 - pts[:, None] * np.conj(lam)[None, :]), axis=1)
    prods_s = values[:, :, None] * np.conj(values[:, None, :])
    prods_a = values[:, :, None] * values[:, None, :]
    sesqui_emp, sesqui_se = _mean_and_se(prods_s)
    analytic_emp, analytic_se = _mean_and_se(prods_a)
    sesqui_exact = -np.log1p(-pts[:, None] * np.conj(pts)[None, :])
    return CueComparison(
        points=pts,
        sesqui_emp=sesqui_emp,
        sesqui_exact=sesqui_exact,
        analytic_emp=analytic_emp,
        sesqui_se=sesqui_se,
        analytic_se=analytic_se,
    )
