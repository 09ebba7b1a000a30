"""Kraus-form channels: validation, application, duals, superoperator
matrices, block reductions, supports and invariance tests.

Vectorization is fixed to column stacking throughout, so that
vec(M rho M^dag) = (conj(M) kron M) vec(rho).
"""

import numpy as np
from dataclasses import dataclass

from .errors import InternalInconsistencyError
from .linalg import (
    SubspaceBasis,
    column_space,
    hermitian_part,
    kernel,
    orth_complement,
    subspace_sum,
)
from .tolerances import HERM_TOL, INV_TOL, ORTH_TOL, RANK_RTOL, TP_TOL_PER_DIM

__all__ = [
    "KrausMap",
    "ValidationReport",
    "BlockDecomposedMap",
    "ReducedMaps",
    "InvarianceCheck",
    "vec",
    "unvec",
    "superoperator",
    "validate",
    "block_decompose",
    "reduced_maps",
    "support_of_state_set",
    "is_invariant",
    "is_subharmonic",
    "dual_support_sequence",
    "check_density",
]


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(x, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return np.asarray(v, dtype=complex).reshape((rows, cols), order="F")


@dataclass(frozen=True)
class KrausMap:
    """A completely positive map as an ordered list of d-by-d Kraus
    operators, stored as a (K, d, d) array."""

    ops: np.ndarray

    def __post_init__(self):
        a = np.array(self.ops, dtype=complex, copy=True)
        if a.ndim != 3 or a.shape[1] != a.shape[2]:
            raise ValueError(f"expected shape (K, d, d), got {a.shape}")
        if a.shape[0] == 0:
            raise ValueError("at least one Kraus operator is required")
        if not np.all(np.isfinite(a)):
            raise ValueError("Kraus operators contain non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "ops", a)

    @classmethod
    def from_matrices(cls, mats) -> "KrausMap":
        mats = [np.atleast_2d(np.asarray(m, dtype=complex)) for m in mats]
        if not mats:
            raise ValueError("at least one Kraus operator is required")
        d = mats[0].shape[0]
        for m in mats:
            if m.shape != (d, d):
                raise ValueError(
                    f"ragged Kraus dimensions: expected {(d, d)}, got {m.shape}"
                )
        return cls(np.stack(mats))

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    @property
    def n_kraus(self) -> int:
        return self.ops.shape[0]

    def scale(self) -> float:
        """Largest Kraus-operator Frobenius norm, for relative residuals."""
        return float(max(np.linalg.norm(m) for m in self.ops))

    def apply(self, x: np.ndarray) -> np.ndarray:
        """sum_k M_k X M_k^dag."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got {x.shape}")
        out = np.zeros_like(x)
        for m in self.ops:
            out += m @ x @ m.conj().T
        return out

    def apply_dual(self, x: np.ndarray) -> np.ndarray:
        """Heisenberg-picture action sum_k M_k^dag X M_k."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got {x.shape}")
        out = np.zeros_like(x)
        for m in self.ops:
            out += m.conj().T @ x @ m
        return out

    def tp_residual(self) -> float:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for m in self.ops:
            acc += m.conj().T @ m
        return float(np.linalg.norm(acc - np.eye(self.dim)))

    def is_tp(self, tol: float | None = None) -> bool:
        tol = TP_TOL_PER_DIM * self.dim if tol is None else tol
        return self.tp_residual() <= tol

    def remix(self, u: np.ndarray) -> "KrausMap":
        """Equivalent Kraus list M'_k = sum_j u[k, j] M_j for unitary u."""
        u = np.asarray(u, dtype=complex)
        if u.shape != (self.n_kraus, self.n_kraus):
            raise ValueError("remixing matrix must be K x K")
        return KrausMap(np.einsum("kj,jab->kab", u, self.ops))


@dataclass(frozen=True)
class ValidationReport:
    is_tp: bool
    tp_residual: float
    dims_ok: bool


def validate(kmap: KrausMap, tol: float | None = None) -> ValidationReport:
    """Trace-preservation report: residual ||sum M^dag M - I||_F."""
    res = kmap.tp_residual()
    tol = TP_TOL_PER_DIM * kmap.dim if tol is None else tol
    return ValidationReport(is_tp=res <= tol, tp_residual=res, dims_ok=True)


def superoperator(kmap: KrausMap) -> np.ndarray:
    """d^2 x d^2 matrix of the channel on column-stacked vectorizations."""
    d = kmap.dim
    s = np.zeros((d * d, d * d), dtype=complex)
    for m in kmap.ops:
        s += np.kron(m.conj(), m)
    return s


def _kraus_superop(blocks: np.ndarray) -> np.ndarray:
    """Superoperator sum_k conj(B_k) kron B_k for a stack of (possibly
    rectangular) blocks B_k mapping the column space to the row space."""
    out_rows = blocks.shape[1] ** 2
    in_cols = blocks.shape[2] ** 2
    s = np.zeros((out_rows, in_cols), dtype=complex)
    for b in blocks:
        s += np.kron(b.conj(), b)
    return s


@dataclass(frozen=True)
class BlockDecomposedMap:
    """Kraus operators rotated into the basis [H_S | H_S^perp] and cut
    into S (m x m), P (m x r), Q (r x m), R (r x r) blocks."""

    base: KrausMap
    s_basis: SubspaceBasis
    r_basis: SubspaceBasis
    s: np.ndarray
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray

    @property
    def s_dim(self) -> int:
        return self.s_basis.dim

    @property
    def r_dim(self) -> int:
        return self.r_basis.dim

    def rotated(self) -> np.ndarray:
        """Full rotated Kraus stack V^dag M_k V with V = [B_S | B_R]."""
        k = self.base.n_kraus
        d = self.base.dim
        out = np.zeros((k, d, d), dtype=complex)
        m = self.s_dim
        out[:, :m, :m] = self.s
        out[:, :m, m:] = self.p
        out[:, m:, :m] = self.q
        out[:, m:, m:] = self.r
        return out


def block_decompose(kmap: KrausMap, h_s: SubspaceBasis) -> BlockDecomposedMap:
    """Cut every Kraus operator into blocks along H_S and its complement."""
    if h_s.ambient_dim != kmap.dim:
        raise ValueError("subspace ambient dimension does not match the channel")
    h_r = orth_complement(h_s)
    bs, br = h_s.basis, h_r.basis
    s = np.einsum("ia,kij,jb->kab", bs.conj(), kmap.ops, bs)
    p = np.einsum("ia,kij,jb->kab", bs.conj(), kmap.ops, br)
    q = np.einsum("ia,kij,jb->kab", br.conj(), kmap.ops, bs)
    r = np.einsum("ia,kij,jb->kab", br.conj(), kmap.ops, br)
    return BlockDecomposedMap(kmap, h_s, h_r, s, p, q, r)


@dataclass(frozen=True)
class ReducedMaps:
    """Superoperator matrices of the three reduced maps induced by a
    split H = H_S + H_R:

      t_s  (m^2 x m^2): A_S -> sum_k S_k A_S S_k^dag
      t_r  (r^2 x r^2): A_R -> sum_k R_k A_R R_k^dag
      t_sr (m^2 x r^2): A_R -> sum_k P_k A_R P_k^dag
    """

    s_basis: SubspaceBasis
    r_basis: SubspaceBasis
    t_s: np.ndarray
    t_r: np.ndarray
    t_sr: np.ndarray


def reduced_maps(kmap: KrausMap, h_s: SubspaceBasis) -> ReducedMaps:
    """Build the reduced superoperators from the OSR blocks and verify
    them against the OSR-independent pinching route."""
    bl = block_decompose(kmap, h_s)
    t_s = _kraus_superop(bl.s)
    t_r = _kraus_superop(bl.r)
    t_sr = _kraus_superop(bl.p)

    # Cross-check T_SR(A_R) = Pi_S T(A_R) Pi_S on a seeded probe; the two
    # routes are algebraically identical, so any gap is a basis bug.
    m, r = bl.s_dim, bl.r_dim
    if m > 0 and r > 0:
        rng = np.random.default_rng(17)
        a_r = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
        a_r = hermitian_part(a_r)
        via_blocks = unvec(t_sr @ vec(a_r), m)
        embedded = bl.r_basis.basis @ a_r @ bl.r_basis.basis.conj().T
        via_pinch = bl.s_basis.basis.conj().T @ kmap.apply(embedded) @ bl.s_basis.basis
        if np.linalg.norm(via_blocks - via_pinch) > 1e-10 * max(
            1.0, float(np.linalg.norm(via_pinch))
        ):
            raise InternalInconsistencyError(
                "reduced map T_SR disagrees between the block and pinching routes"
            )
    return ReducedMaps(bl.s_basis, bl.r_basis, t_s, t_r, t_sr)


def support_of_state_set(states, tol: float = RANK_RTOL) -> SubspaceBasis:
    """Smallest subspace containing the supports of all given PSD
    operators (the sum of the individual supports)."""
    states = [np.asarray(s, dtype=complex) for s in states]
    if not states:
        raise ValueError("empty state set")
    d = states[0].shape[0]
    acc = SubspaceBasis.zero(d)
    for s in states:
        if s.shape != (d, d):
            raise ValueError("states have inconsistent dimensions")
        scale = max(1.0, float(np.linalg.norm(s)))
        if np.linalg.norm(s - s.conj().T) > HERM_TOL * scale:
            raise ValueError("state is not Hermitian within tolerance")
        h = hermitian_part(s)
        w = np.linalg.eigvalsh(h)
        if w.size and w[0] < -tol * max(1.0, float(w[-1])):
            raise ValueError("state is not PSD within tolerance")
        acc = subspace_sum(acc, column_space(h))
    return acc


@dataclass(frozen=True)
class InvarianceCheck:
    is_invariant: bool
    residual: float

    def __bool__(self) -> bool:
        return self.is_invariant


def is_invariant(kmap: KrausMap, h_s: SubspaceBasis, tol: float = INV_TOL) -> InvarianceCheck:
    """Decide invariance of H_S from the OSR Q-blocks, cross-checked
    against the support criterion supp(T(Pi_S / m)) in H_S.

    The residual is max_k ||M_{k,Q}||_F; the subspace is invariant when
    it stays below tol times the largest Kraus norm.  Disagreement of
    the two (equivalent) criteria raises InternalInconsistencyError.
    """
    if h_s.ambient_dim != kmap.dim:
        raise ValueError("subspace ambient dimension does not match the channel")
    m, d = h_s.dim, kmap.dim
    if m == 0 or m == d:
        return InvarianceCheck(True, 0.0)
    bl = block_decompose(kmap, h_s)
    scale = kmap.scale()
    res_blocks = float(max(np.linalg.norm(q) for q in bl.q))
    flag_blocks = res_blocks <= tol * scale

    w = hermitian_part(kmap.apply(h_s.projector() / m))
    flag_supp = h_s.contains(column_space(w))
    if flag_blocks != flag_supp:
        raise InternalInconsistencyError(
            "invariance criteria disagree: "
            f"block residual {res_blocks:.3e}, support containment {flag_supp}"
        )
    return InvarianceCheck(flag_blocks, res_blocks)


def is_subharmonic(kmap: KrausMap, h_s: SubspaceBasis, tol: float = RANK_RTOL) -> bool:
    """True when T^*(Pi_S) >= Pi_S (equivalent to invariance for TP maps)."""
    if not kmap.is_tp():
        raise ValueError("sub-harmonicity is defined for trace-preserving maps")
    if h_s.ambient_dim != kmap.dim:
        raise ValueError("subspace ambient dimension does not match the channel")
    pi = h_s.projector()
    diff = hermitian_part(kmap.apply_dual(pi) - pi)
    w = np.linalg.eigvalsh(diff)
    lam_min = float(w[0]) if w.size else 0.0
    return lam_min >= -tol * max(1.0, float(np.linalg.norm(diff)))


def dual_support_sequence(
    kmap: KrausMap, h_s: SubspaceBasis, max_steps: int | None = None
) -> list[SubspaceBasis]:
    """Supports of T^{*n}(Pi_S) for n = 0, 1, ... until two consecutive
    supports coincide or `max_steps` dual applications were made.

    H_S must be invariant (the monotonicity of the sequence rests on
    it); the non-decreasing property is asserted along the way.
    """
    chk = is_invariant(kmap, h_s)
    if not chk:
        raise ValueError(
            f"subspace is not invariant (residual {chk.residual:.3e}); "
            "the dual support sequence is only monotone for invariant subspaces"
        )
    d = kmap.dim
    steps = d + 1 if max_steps is None else int(max_steps)
    a = h_s.projector()
    supports = [h_s]
    prev = h_s
    for _ in range(steps):
        a = hermitian_part(kmap.apply_dual(a))
        cur = column_space(a)
        if not cur.contains(prev):
            raise InternalInconsistencyError(
                "dual support sequence decreased; invariance premise violated numerically"
            )
        supports.append(cur)
        if cur.equals(prev):
            break
        prev = cur
    return supports


def check_density(rho: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Validate a density operator (Hermitian, PSD, unit trace)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {rho.shape[0]}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("state contains non-finite entries")
    scale = max(1.0, float(np.linalg.norm(rho)))
    if np.linalg.norm(rho - rho.conj().T) > HERM_TOL * scale:
        raise ValueError("state is not Hermitian within tolerance")
    w = np.linalg.eigvalsh(hermitian_part(rho))
    if w[0] < -RANK_RTOL * max(1.0, float(w[-1])):
        raise ValueError(f"state is not PSD (min eigenvalue {w[0]:.3e})")
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > 1e-9:
        raise ValueError(f"state trace is {tr!r}, expected 1")
    return rho
