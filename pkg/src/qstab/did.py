"""Dissipation-induced decomposition: the chain of transient subspaces
dynamically connected to an invariant subspace, with per-stage one-step
transition-rate bounds, the success/failure GAS decision and its dual
(Heisenberg-picture) characterization.

At each step the kernel of the stacked S-to-R coupling blocks splits the
remainder into the part feeding the chain and the part not yet reached.
A run that terminates with a trivial kernel is successful (the subspace
is GAS); termination with all couplings zero leaves an invariant trapped
subspace behind.
"""

import numpy as np
from dataclasses import dataclass

from .channel import KrausMap, dual_support_sequence, is_invariant
from .errors import InternalInconsistencyError
from .linalg import SubspaceBasis, kernel, orth_complement
from .tolerances import INV_TOL, ORTH_TOL

__all__ = [
    "DidStage",
    "DidResult",
    "TransitionRates",
    "did",
    "is_gas_did",
    "is_gas_dual",
    "did_dual_consistency",
    "transition_rates",
]


@dataclass(frozen=True)
class DidStage:
    subspace: SubspaceBasis
    gamma_min: float
    gamma_max: float


@dataclass(frozen=True)
class DidResult:
    initial: SubspaceBasis
    stages: tuple[DidStage, ...]
    successful: bool
    trapped: SubspaceBasis | None
    basis: np.ndarray
    block_sizes: tuple[int, ...]
    block_form: np.ndarray

    @property
    def chain_subspaces(self) -> tuple[SubspaceBasis, ...]:
        """Cumulative subspaces H_S, H_S + T_1, H_S + T_1 + T_2, ..."""
        out = [self.initial]
        acc = self.initial.basis
        for st in self.stages:
            acc = np.hstack([acc, st.subspace.basis])
            out.append(SubspaceBasis(acc))
        return tuple(out)


@dataclass(frozen=True)
class TransitionRates:
    per_stage: tuple[tuple[float, float], ...]
    bottleneck: float | None


def _fix_phases(b: np.ndarray) -> np.ndarray:
    """Deterministic per-column phase: first nonzero component real
    positive."""
    b = np.array(b, copy=True)
    for j in range(b.shape[1]):
        col = b[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-10 * max(1.0, float(np.abs(col).max())))
        if nz.size:
            pivot = col[nz[0]]
            b[:, j] = col * (pivot.conj() / abs(pivot))
    return b


def _rate_extrema(p_blocks: np.ndarray, v_t: np.ndarray) -> tuple[float, float]:
    """Eigen-extrema of sum_k (P_k V_T)^dag (P_k V_T)."""
    t = v_t.shape[1]
    gram = np.zeros((t, t), dtype=complex)
    for p in p_blocks:
        pv = p @ v_t
        gram += pv.conj().T @ pv
    w = np.linalg.eigvalsh(gram)
    return float(w[0]), float(w[-1])


def did(kmap: KrausMap, h_s: SubspaceBasis) -> DidResult:
    """Dissipation-induced decomposition starting from an invariant
    subspace."""
    chk = is_invariant(kmap, h_s)
    if not chk:
        raise ValueError(
            f"starting subspace is not invariant (residual {chk.residual:.3e})"
        )
    d = kmap.dim
    scale = kmap.scale()
    s_cols = h_s.basis
    h_r = orth_complement(h_s)
    stages: list[DidStage] = []
    successful = True
    trapped: SubspaceBasis | None = None

    while h_r.dim > 0:
        r_dim = h_r.dim
        # S-to-R coupling blocks of every Kraus operator for the current split.
        p_blocks = np.einsum("ia,kij,jb->kab", s_cols.conj(), kmap.ops, h_r.basis)
        stacked = p_blocks.reshape(-1, r_dim)
        if float(max(np.linalg.norm(p) for p in p_blocks)) <= INV_TOL * scale:
            # Case 1: nothing in the remainder feeds the chain; it is trapped.
            stages.append(DidStage(h_r, 0.0, 0.0))
            successful = False
            trapped = h_r
            break
        ker_local = kernel(stacked)
        if ker_local.dim == 0:
            # Case 2: the whole remainder is dynamically connected; done.
            v_t = _fix_phases(np.eye(r_dim, dtype=complex))
            gmin, gmax = _rate_extrema(p_blocks, v_t)
            stages.append(DidStage(SubspaceBasis(h_r.basis @ v_t), gmin, gmax))
            break
        # Case 3: split off the connected part and iterate on the rest.
        t_local = _fix_phases(orth_complement(ker_local).basis)
        gmin, gmax = _rate_extrema(p_blocks, t_local)
        h_t = SubspaceBasis(h_r.basis @ t_local)
        stages.append(DidStage(h_t, gmin, gmax))
        s_cols = np.hstack([s_cols, h_t.basis])
        h_r = SubspaceBasis(h_r.basis @ _fix_phases(ker_local.basis))

    basis = h_s.basis
    sizes = [h_s.dim]
    for st in stages:
        basis = np.hstack([basis, st.subspace.basis])
        sizes.append(st.subspace.dim)
    block_form = np.einsum("ia,kij,jb->kab", basis.conj(), kmap.ops, basis)
    _check_block_pattern(block_form, sizes, successful, scale)
    return DidResult(
        initial=h_s,
        stages=tuple(stages),
        successful=successful,
        trapped=trapped,
        basis=basis,
        block_sizes=tuple(sizes),
        block_form=block_form,
    )


def _check_block_pattern(
    block_form: np.ndarray, sizes: list[int], successful: bool, scale: float
) -> None:
    """Verify the structural zeros of the decomposition in its own basis:
    the first block column vanishes below the diagonal, everything above
    the first superdiagonal vanishes, and an unsuccessful run has a zero
    coupling into its final (trapped) block."""
    edges = np.concatenate([[0], np.cumsum(sizes)])
    n = len(sizes)
    tol = INV_TOL * max(1.0, scale) * 10
    for row in range(n):
        for col in range(n):
            above_superdiag = col >= row + 2
            below_first_col = col == 0 and row >= 1
            last_col_zero = (
                not successful and col == n - 1 and row <= n - 2 and n >= 2
            )
            if not (above_superdiag or below_first_col or last_col_zero):
                continue
            blk = block_form[:, edges[row]:edges[row + 1], edges[col]:edges[col + 1]]
            if blk.size and float(np.linalg.norm(blk)) > tol:
                raise InternalInconsistencyError(
                    f"decomposition block ({row}, {col}) violates the expected "
                    f"zero pattern (norm {np.linalg.norm(blk):.3e})"
                )


def is_gas_did(kmap: KrausMap, h_s: SubspaceBasis) -> bool:
    """GAS decision by running the decomposition to termination."""
    return did(kmap, h_s).successful


def is_gas_dual(kmap: KrausMap, h_s: SubspaceBasis) -> bool:
    """GAS decision from the dual support sequence: the supports of
    T^{*n}(Pi_S) must strictly increase until they cover C^d."""
    d = kmap.dim
    seq = dual_support_sequence(kmap, h_s, max_steps=d + 1)
    dims = [s.dim for s in seq]
    if dims[-1] < d:
        return False
    for a, b in zip(dims, dims[1:]):
        if a >= d:
            break
        if b <= a:
            return False
    return True


def did_dual_consistency(kmap: KrausMap, h_s: SubspaceBasis) -> bool:
    """Check that supp(T^{*n}(Pi_S)) equals the n-th cumulative chain
    subspace for every n up to the chain length (successful runs only)."""
    result = did(kmap, h_s)
    if not result.successful:
        raise ValueError("dual consistency is defined for successful runs only")
    chain = result.chain_subspaces
    seq = dual_support_sequence(kmap, h_s, max_steps=len(chain) + 1)
    tol = ORTH_TOL * kmap.dim
    for n, expected in enumerate(chain):
        if n >= len(seq):
            return False
        if not seq[n].equals(expected, tol):
            return False
    return True


def transition_rates(result: DidResult) -> TransitionRates:
    """Per-stage one-step rate bounds and the chain bottleneck (the
    smallest lower bound).  Only meaningful for successful runs."""
    if not result.successful:
        raise ValueError("transition rates are defined for successful runs only")
    pairs = tuple((st.gamma_min, st.gamma_max) for st in result.stages)
    bottleneck = min((g for g, _ in pairs), default=None)
    return TransitionRates(pairs, bottleneck)
