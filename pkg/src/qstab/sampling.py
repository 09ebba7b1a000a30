"""Random trace-preserving channels with planted invariant structure.

Channels are built from a random Kd-by-d isometry: stacking the K Kraus
operators vertically, trace preservation is exactly column
orthonormality.  An invariant subspace is planted by restricting the
first block of columns to the matching rows of every Kraus operator
(block upper-triangular form), then conjugating everything by a Haar
unitary so the subspace is in general position.

Structures:

  "coupled"      generic coupling of the remainder into the invariant
                 subspace; almost surely GAS.
  "decoupled"    zero coupling; the whole remainder is invariant
                 (never GAS for a proper subspace).
  "trapped_tail" the remainder splits into a part that feeds the chain
                 and an invariant tail (not GAS, nontrivial chain).
"""

import numpy as np

from .channel import KrausMap
from .linalg import SubspaceBasis, hermitian_part

__all__ = [
    "haar_unitary",
    "random_density",
    "random_tp_channel",
    "random_invariant_channel",
]


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    b = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = b @ b.conj().T
    return hermitian_part(rho / np.real(np.trace(rho)))


def _orthonormal_completion(
    fixed: np.ndarray, count: int, row_mask: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """`count` orthonormal columns, orthogonal to `fixed`, supported on
    the rows selected by `row_mask`."""
    rows = fixed.shape[0]
    x = np.zeros((rows, count), dtype=complex)
    n_active = int(np.sum(row_mask))
    x[row_mask, :] = rng.normal(size=(n_active, count)) + 1j * rng.normal(
        size=(n_active, count)
    )
    if fixed.shape[1]:
        x -= fixed @ (fixed.conj().T @ x)
    q, _ = np.linalg.qr(x)
    return q


def _stacked_isometry(
    dim: int,
    n_kraus: int,
    part_dims: tuple[int, ...],
    structure: str,
    rng: np.random.Generator,
    tail_dim: int,
) -> np.ndarray:
    m = sum(part_dims)
    r = dim - m
    rows = n_kraus * dim
    cols = []
    offset = 0
    for pd in part_dims:
        mask = np.zeros(rows, dtype=bool)
        for k in range(n_kraus):
            mask[k * dim + offset : k * dim + offset + pd] = True
        fixed = np.hstack(cols) if cols else np.zeros((rows, 0), dtype=complex)
        cols.append(_orthonormal_completion(fixed, pd, mask, rng))
        offset += pd
    if r > 0:
        s_mask = np.zeros(rows, dtype=bool)
        r_mask = np.zeros(rows, dtype=bool)
        tail_mask = np.zeros(rows, dtype=bool)
        for k in range(n_kraus):
            s_mask[k * dim : k * dim + m] = True
            r_mask[k * dim + m : k * dim + dim - tail_dim] = True
            tail_mask[k * dim + dim - tail_dim : (k + 1) * dim] = True
        fixed = np.hstack(cols)
        if structure == "coupled":
            cols.append(_orthonormal_completion(fixed, r, s_mask | r_mask | tail_mask, rng))
        elif structure == "decoupled":
            cols.append(_orthonormal_completion(fixed, r, r_mask | tail_mask, rng))
        elif structure == "trapped_tail":
            head = r - tail_dim
            if head <= 0 or tail_dim <= 0:
                raise ValueError("trapped_tail needs a nonempty head and tail")
            cols.append(_orthonormal_completion(fixed, head, s_mask | r_mask, rng))
            fixed = np.hstack(cols)
            cols.append(_orthonormal_completion(fixed, tail_dim, tail_mask, rng))
        else:
            raise ValueError(f"unknown structure {structure!r}")
    return np.hstack(cols)


def random_tp_channel(dim: int, n_kraus: int, rng: np.random.Generator) -> KrausMap:
    """Random TP channel with no planted structure."""
    z = rng.normal(size=(n_kraus * dim, dim)) + 1j * rng.normal(size=(n_kraus * dim, dim))
    q, _ = np.linalg.qr(z)
    return KrausMap(q.reshape(n_kraus, dim, dim))


def random_invariant_channel(
    dim: int,
    part_dims: tuple[int, ...],
    n_kraus: int,
    rng: np.random.Generator,
    structure: str = "coupled",
    tail_dim: int = 1,
    conjugate: bool = True,
) -> tuple[KrausMap, SubspaceBasis, list[SubspaceBasis]]:
    """Random TP channel with a planted invariant subspace of dimension
    sum(part_dims), itself split into invariant orthogonal parts.

    Returns the channel, the planted subspace, and the parts (in the
    conjugated frame).
    """
    m = sum(part_dims)
    if not 1 <= m <= dim:
        raise ValueError("part dimensions must sum to something in [1, dim]")
    if structure != "coupled" and m == dim:
        raise ValueError("a proper remainder is required for this structure")
    t = _stacked_isometry(dim, n_kraus, tuple(part_dims), structure, rng, tail_dim)
    ops = t.reshape(n_kraus, dim, dim)
    u = haar_unitary(dim, rng) if conjugate else np.eye(dim, dtype=complex)
    ops = np.einsum("ab,kbc,dc->kad", u, ops, u.conj())
    kmap = KrausMap(ops)
    parts = []
    offset = 0
    for pd in part_dims:
        parts.append(SubspaceBasis(u[:, offset : offset + pd]))
        offset += pd
    return kmap, SubspaceBasis(u[:, :m]), parts
