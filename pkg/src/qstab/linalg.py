"""Dense complex linear algebra: kernels, ranges, subspace arithmetic,
eigenstructure and PSD-cone operations.

Subspaces of C^d are represented by matrices with orthonormal columns
(isometries); the zero subspace is a d-by-0 matrix.  Subspace equality is
always decided on orthogonal projectors, never on bases.
"""

from dataclasses import dataclass

import numpy as np

from .tolerances import HERM_TOL, ORTH_TOL, RANK_ATOL, RANK_RTOL

__all__ = [
    "SubspaceBasis",
    "SpectralData",
    "kernel",
    "column_space",
    "subspace_sum",
    "orth_complement",
    "eig",
    "psd_cone_project",
    "hermitian_part",
    "projector_distance",
]


def _as_complex(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """(A + A^dag) / 2."""
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().T) / 2


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of C^d held as a d-by-m matrix with orthonormal columns.

    m may be zero (the zero subspace).  Instances are immutable; the
    stored array is made read-only.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex, copy=True)
        if b.ndim != 2:
            raise ValueError(f"basis must be 2-D, got shape {b.shape}")
        d, m = b.shape
        if m > d:
            raise ValueError(f"more columns ({m}) than ambient dimension ({d})")
        if not np.all(np.isfinite(b)):
            raise ValueError("basis contains non-finite entries")
        if m > 0:
            gram = b.conj().T @ b
            if np.linalg.norm(gram - np.eye(m)) > ORTH_TOL * max(1, d):
                raise ValueError("columns are not orthonormal within tolerance")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, d: int) -> "SubspaceBasis":
        return cls(np.zeros((d, 0)))

    @classmethod
    def full(cls, d: int) -> "SubspaceBasis":
        return cls(np.eye(d))

    @classmethod
    def from_indices(cls, d: int, indices) -> "SubspaceBasis":
        """Span of computational basis vectors (0-based indices)."""
        idx = list(indices)
        b = np.zeros((d, len(idx)), dtype=complex)
        for col, i in enumerate(idx):
            if not 0 <= i < d:
                raise ValueError(f"index {i} out of range for dimension {d}")
            b[i, col] = 1.0
        return cls(b)

    @classmethod
    def from_span(cls, vectors: np.ndarray) -> "SubspaceBasis":
        """Orthonormalize the columns of `vectors` (rank-revealing)."""
        return column_space(_as_complex(np.atleast_2d(vectors)))

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def complement(self) -> "SubspaceBasis":
        return orth_complement(self)

    def contains(self, other: "SubspaceBasis", tol: float | None = None) -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimensions differ")
        if other.dim == 0:
            return True
        tol = ORTH_TOL * self.ambient_dim if tol is None else tol
        resid = other.basis - self.projector() @ other.basis
        return bool(np.linalg.norm(resid) <= tol)

    def equals(self, other: "SubspaceBasis", tol: float | None = None) -> bool:
        """Subspace equality via projector Frobenius distance."""
        tol = ORTH_TOL * self.ambient_dim if tol is None else tol
        return projector_distance(self, other) <= tol


def projector_distance(u: SubspaceBasis, v: SubspaceBasis) -> float:
    if u.ambient_dim != v.ambient_dim:
        raise ValueError("ambient dimensions differ")
    return float(np.linalg.norm(u.projector() - v.projector()))


def _rank_cutoff(s: np.ndarray, rtol: float, atol: float) -> float:
    smax = float(s[0]) if s.size else 0.0
    return rtol * smax if smax > atol else atol


def kernel(a, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> SubspaceBasis:
    """Orthonormal basis of the numerical null space of `a`.

    Right singular vectors whose singular value is at most
    rtol * sigma_max are kept; a numerically zero matrix returns the
    full space (absolute floor `atol`).
    """
    a = _as_complex(np.atleast_2d(a))
    m, n = a.shape
    if n == 0:
        return SubspaceBasis.zero(0)
    if m == 0:
        return SubspaceBasis.full(n)
    _, s, vh = np.linalg.svd(a)
    cut = _rank_cutoff(s, rtol, atol)
    rank = int(np.sum(s > cut))
    return SubspaceBasis(vh[rank:].conj().T)


def column_space(a, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> SubspaceBasis:
    """Orthonormal basis of the column space of `a` (the support, for
    Hermitian `a`)."""
    a = _as_complex(np.atleast_2d(a))
    m, n = a.shape
    if m == 0:
        return SubspaceBasis.zero(0)
    if n == 0:
        return SubspaceBasis.zero(m)
    u, s, _ = np.linalg.svd(a)
    cut = _rank_cutoff(s, rtol, atol)
    rank = int(np.sum(s > cut))
    return SubspaceBasis(u[:, :rank])


def subspace_sum(u: SubspaceBasis, v: SubspaceBasis) -> SubspaceBasis:
    """Orthonormal basis of u + v."""
    if u.ambient_dim != v.ambient_dim:
        raise ValueError("ambient dimensions differ")
    if u.dim == 0:
        return v
    if v.dim == 0:
        return u
    return column_space(np.hstack([u.basis, v.basis]))


def orth_complement(u: SubspaceBasis) -> SubspaceBasis:
    """Orthonormal basis of the orthogonal complement of u."""
    if u.dim == 0:
        return SubspaceBasis.full(u.ambient_dim)
    return kernel(u.basis.conj().T)


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues of a square matrix plus access to generalized
    eigenspaces ker((A - sigma I)^p)."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    spectral_radius: float

    def generalized_eigenspace(self, sigma: complex, power: int | None = None) -> SubspaceBasis:
        """Orthonormal basis of ker((A - sigma I)^p).

        `power` is capped at the matrix dimension (the index of any
        eigenvalue never exceeds it).  The space is computed by the
        nested kernel chain V_{j+1} = ker((I - P_j)(A - sigma I)),
        which evaluates ker((A - sigma I)^j) exactly without forming
        matrix powers; the chain stabilizes at the eigenvalue index.
        """
        a = self.matrix
        n = a.shape[0]
        p = n if power is None else min(int(power), n)
        if n == 0:
            return SubspaceBasis.zero(0)
        c = a - sigma * np.eye(n)
        v = kernel(c)
        for _ in range(1, p):
            if v.dim == n or v.dim == 0:
                break
            w = kernel((np.eye(n) - v.projector()) @ c)
            if w.dim == v.dim:
                break
            v = w
        return v


def eig(a) -> SpectralData:
    """All eigenvalues (with multiplicity) and the spectral radius."""
    a = _as_complex(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        vals = np.zeros(0, dtype=complex)
        return SpectralData(a, vals, 0.0)
    vals = np.linalg.eigvals(a)
    return SpectralData(a, vals, float(np.max(np.abs(vals))))


def psd_cone_project(a, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (eigenvalue clamping).

    Raises ValueError if `a` is not Hermitian within `herm_tol`
    (relative to its size).
    """
    a = _as_complex(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.linalg.norm(a - a.conj().T) > herm_tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    h = hermitian_part(a)
    w, v = np.linalg.eigh(h)
    w = np.maximum(w, 0.0)
    return hermitian_part((v * w) @ v.conj().T)
