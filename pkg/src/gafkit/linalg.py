"""Dense complex matrix services and reproducible random streams.

Conventions fixed here and used everywhere else:

* a *standard complex Gaussian* has independent real and imaginary parts of
  variance 1/2 each, so ``E|g|**2 = 1`` and ``E g**2 = 0``;
* random streams are counter-based (Philox) and keyed by the pair
  ``(seed, stream_id)``, so identical pairs reproduce identical draws and
  distinct stream ids may be consumed concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Slack on norm certificates: "contraction" means norm <= 1 + CONTRACTION_SLACK.
CONTRACTION_SLACK = 1e-9
# Eigenvalues of nominally-PSD matrices may undershoot by this much before the
# square root refuses; boundary-of-norm-one defects must not fail spuriously.
EIG_CLAMP = -1e-10


@dataclass(frozen=True)
class RngStream:
    """Seedable, splittable random stream keyed by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.seed & 0xFFFFFFFFFFFFFFFF, self.stream_id & 0xFFFFFFFFFFFFFFFF],
            dtype=np.uint64,
        )
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, k: int) -> "RngStream":
        """Derived stream for sub-task ``k``; deterministic in (seed, stream_id, k)."""
        return RngStream(self.seed, self.stream_id * 1_000_003 + k + 1)

    def standard_complex_normal(self, shape) -> np.ndarray:
        """Draws with ``E|g|**2 = 1``, ``E g**2 = 0``."""
        g = self.generator()
        re = g.standard_normal(shape)
        im = g.standard_normal(shape)
        return (re + 1j * im) / np.sqrt(2.0)


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value (spectral norm)."""
    m = np.asarray(m)
    if not np.all(np.isfinite(m)):
        raise ValueError("operator_norm requires finite entries")
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True)
class ContractionMatrix:
    """Finite complex matrix carrying a certified operator norm."""

    entries: np.ndarray
    norm_certificate: float

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"entries must be a square matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @staticmethod
    def from_entries(entries) -> "ContractionMatrix":
        entries = np.asarray(entries, dtype=np.complex128)
        return ContractionMatrix(entries, operator_norm(entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_contraction(self) -> bool:
        return self.norm_certificate <= 1.0 + CONTRACTION_SLACK

    def require_contraction(self) -> "ContractionMatrix":
        if not self.is_contraction:
            raise ValueError(f"matrix is not a contraction: norm = {self.norm_certificate}")
        return self


def _require_hermitian(p: np.ndarray, tol: float) -> np.ndarray:
    p = np.asarray(p, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(p))) if p.size else 1.0)
    if np.max(np.abs(p - p.conj().T)) > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return p


def psd_sqrt(p: np.ndarray, herm_tol: float = 1e-12) -> np.ndarray:
    """Hermitian square root of a Hermitian PSD matrix.

    Eigenvalues in [EIG_CLAMP, 0) are clamped to zero; anything below
    EIG_CLAMP signals a genuinely non-PSD input (e.g. a non-contraction fed
    to a defect computation) and raises.
    """
    p = _require_hermitian(p, herm_tol)
    vals, vecs = np.linalg.eigh(p)
    if vals[0] < EIG_CLAMP:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {vals[0]}")
    vals = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(vals)) @ vecs.conj().T
    return (root + root.conj().T) / 2.0


def defect(a: ContractionMatrix | np.ndarray) -> np.ndarray:
    """Defect operator ``(I - A* A)**(1/2)`` of a contraction."""
    if isinstance(a, ContractionMatrix):
        a.require_contraction()
        m = a.entries
    else:
        m = np.asarray(a, dtype=np.complex128)
        if operator_norm(m) > 1.0 + CONTRACTION_SLACK:
            raise ValueError("defect requires a contraction")
    eye = np.eye(m.shape[0])
    return psd_sqrt(eye - m.conj().T @ m)


def psd_check(m: np.ndarray, tol: float) -> tuple[bool, float]:
    """Whether the smallest eigenvalue of a Hermitian matrix is >= -tol."""
    m = _require_hermitian(m, tol)
    smallest = float(np.linalg.eigvalsh(m)[0])
    return smallest >= -tol, smallest


def haar_unitary(n: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed n x n unitary.

    Complex Ginibre matrix, QR factorization, then the phase normalization
    ``Q <- Q diag(r_ii/|r_ii|)`` that makes the distribution exactly Haar.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    g = rng.standard_complex_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
