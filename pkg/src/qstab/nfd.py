"""Nested-face decomposition: iterated extraction of the slowest
peripheral face of the transient cone, with a GAS decision and the
minimal GAS enlargement of the starting subspace.

Each stage reduces the channel to the orthogonal complement of the
current invariant subspace, locates the spectral radius sigma of the
reduced map, and adds the support of the PSD part of the generalized
sigma-eigenspace to the chain.  The produced radii strictly decrease;
the starting subspace is GAS exactly when the first radius is below 1.
"""

import numpy as np
from dataclasses import dataclass

from .channel import (
    KrausMap,
    block_decompose,
    _kraus_superop,
    is_invariant,
    support_of_state_set,
    unvec,
    vec,
)
from .errors import InternalInconsistencyError, NumericalDegeneracyError
from .linalg import SubspaceBasis, eig, hermitian_part, orth_complement
from .tolerances import ORTH_TOL, RANK_RTOL, SPEC_TOL

__all__ = ["NfdStage", "NfdResult", "peripheral_face_support", "nfd"]

# Dykstra alternating-projection parameters for the PSD-element search.
DYKSTRA_MAX_ITER = 5000
DYKSTRA_STEP_TOL = 1e-12
CESARO_STEPS = 256
N_RANDOM_SEEDS = 15
_SEED = 0x51AB


@dataclass(frozen=True)
class NfdStage:
    subspace: SubspaceBasis
    sigma: float


@dataclass(frozen=True)
class NfdResult:
    initial: SubspaceBasis
    stages: tuple[NfdStage, ...]
    chain: tuple[SubspaceBasis, ...]
    is_gas: bool
    minimal_gas: SubspaceBasis


def _herm_to_real(h: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian r x r matrix (length r^2)."""
    r = h.shape[0]
    iu = np.triu_indices(r, k=1)
    return np.concatenate(
        [np.real(np.diag(h)), np.sqrt(2.0) * np.real(h[iu]), np.sqrt(2.0) * np.imag(h[iu])]
    )


def _real_to_herm(x: np.ndarray, r: int) -> np.ndarray:
    h = np.zeros((r, r), dtype=complex)
    h[np.diag_indices(r)] = x[:r]
    iu = np.triu_indices(r, k=1)
    n_off = iu[0].size
    off = (x[r : r + n_off] + 1j * x[r + n_off :]) / np.sqrt(2.0)
    h[iu] = off
    h += np.tril(h.conj().T, k=-1)
    return h


def _hermitian_basis_of(span_vecs: np.ndarray, r: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) Hermitian basis of an adjoint-closed
    matrix subspace given by vectorized columns; returned in the real
    isometric coordinates, one basis element per column."""
    cands = []
    for col in span_vecs.T:
        b = unvec(col, r)
        cands.append(_herm_to_real(hermitian_part(b)))
        cands.append(_herm_to_real(hermitian_part(-1j * b)))
    m = np.column_stack(cands)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    cut = RANK_RTOL * s[0] if s.size and s[0] > 0 else RANK_RTOL
    return u[:, : int(np.sum(s > cut))]


def _cesaro_seed(t_r: np.ndarray, sigma: float, r: int) -> np.ndarray:
    """Cesaro-averaged iterate of the maximally mixed state under the
    sigma-rescaled reduced map; damps rotating peripheral phases."""
    rho = np.eye(r, dtype=complex) / r
    if sigma <= 1e-12:
        return rho
    cur = vec(rho)
    acc = np.zeros_like(cur)
    scaled = t_r / sigma
    for _ in range(CESARO_STEPS):
        cur = scaled @ cur
        acc += cur
    seed = hermitian_part(unvec(acc / CESARO_STEPS, r))
    tr = float(np.real(np.trace(seed)))
    if abs(tr) > 1e-12:
        seed = seed / tr
    return seed


def _dykstra_psd_in_subspace(seed: np.ndarray, basis_real: np.ndarray, r: int):
    """Project `seed` onto (subspace spanned by basis_real) intersected
    with the PSD cone by Dykstra alternating projections.

    Returns the limit matrix, or None if the iteration hit the cap.
    """
    x = _herm_to_real(seed)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    proj = basis_real @ basis_real.T
    for _ in range(DYKSTRA_MAX_ITER):
        y = proj @ (x + p)
        p = x + p - y
        h = _real_to_herm(y + q, r)
        w, v = np.linalg.eigh(h)
        x_new = _herm_to_real((v * np.maximum(w, 0.0)) @ v.conj().T)
        q = y + q - x_new
        if np.linalg.norm(x_new - x) < DYKSTRA_STEP_TOL:
            return _real_to_herm(x_new, r)
        x = x_new
    return None


def peripheral_face_support(t_r: np.ndarray, r: int) -> tuple[float, SubspaceBasis]:
    """Spectral radius of a reduced CP map and the support of the PSD
    part of its generalized radius-eigenspace.

    `t_r` is the r^2 x r^2 superoperator of the reduced map.  The radius
    is snapped to the nearest real eigenvalue (positivity guarantees one
    exists); the PSD elements are located by Dykstra projections between
    the Hermitian part of the generalized eigenspace and the PSD cone,
    started from a Cesaro-averaged seed plus fixed random Hermitian
    seeds.  Never returns the zero subspace silently.
    """
    if r < 1:
        raise ValueError("the reduced space must have dimension at least 1")
    t_r = np.asarray(t_r, dtype=complex)
    if t_r.shape != (r * r, r * r):
        raise ValueError(f"superoperator must be {r * r} x {r * r}, got {t_r.shape}")

    spec = eig(t_r)
    radius = spec.spectral_radius
    real_cands = spec.eigenvalues[np.abs(spec.eigenvalues - radius) <= 1e-8]
    if real_cands.size == 0:
        raise NumericalDegeneracyError(
            "no real eigenvalue within 1e-8 of the spectral radius "
            f"{radius!r}; eigenvalues: {np.sort_complex(spec.eigenvalues)!r}"
        )
    sigma = float(np.real(real_cands[np.argmin(np.abs(real_cands - radius))]))

    gen = spec.generalized_eigenspace(sigma, power=r * r)
    if gen.dim == 0:
        raise NumericalDegeneracyError(
            f"generalized eigenspace at sigma={sigma!r} is numerically empty"
        )
    basis_real = _hermitian_basis_of(gen.basis, r)

    rng = np.random.default_rng(_SEED)
    seeds = [_cesaro_seed(t_r, sigma, r)]
    for _ in range(N_RANDOM_SEEDS):
        g = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
        h = hermitian_part(g)
        seeds.append(h / np.linalg.norm(h))

    accepted = []
    proj = basis_real @ basis_real.T
    for seed in seeds:
        x = _dykstra_psd_in_subspace(seed, basis_real, r)
        if x is None:
            continue
        norm = float(np.linalg.norm(x))
        if norm <= 1e-8:
            continue
        in_span = np.linalg.norm(_herm_to_real(x) - proj @ _herm_to_real(x))
        if in_span > ORTH_TOL * max(1.0, norm):
            continue
        w = np.linalg.eigvalsh(x)
        if w[0] < -RANK_RTOL * max(1.0, float(w[-1])):
            continue
        accepted.append(x / np.real(np.trace(x)))
    if not accepted:
        raise NumericalDegeneracyError(
            "no PSD element found in the generalized radius-eigenspace "
            f"(sigma={sigma!r}, eigenspace dim={gen.dim}, r={r}); "
            "all Dykstra restarts collapsed or failed to converge"
        )

    h_t = support_of_state_set(accepted)
    if h_t.dim == 0:
        raise NumericalDegeneracyError("PSD elements found but their support is empty")

    # The support of an invariant set must itself be invariant under the
    # reduced map; a leak means the support union is under-converged.
    p_t = h_t.projector()
    image = hermitian_part(unvec(t_r @ vec(p_t / h_t.dim), r))
    p_out = np.eye(r) - p_t
    leak = float(np.real(np.trace(p_out @ image @ p_out)))
    if leak > 1e-8 * max(1.0, abs(float(np.real(np.trace(image))))):
        raise NumericalDegeneracyError(
            f"extracted face support is not invariant (leak {leak:.3e}); "
            "PSD-element search under-converged"
        )
    return sigma, h_t


def nfd(kmap: KrausMap, h_s: SubspaceBasis, tau_spec: float = SPEC_TOL) -> NfdResult:
    """Nested-face decomposition of the complement of an invariant
    subspace, with the GAS verdict and minimal GAS enlargement."""
    chk = is_invariant(kmap, h_s)
    if not chk:
        raise ValueError(
            f"starting subspace is not invariant (residual {chk.residual:.3e})"
        )
    d = kmap.dim
    stages: list[NfdStage] = []
    chain: list[SubspaceBasis] = [h_s]
    current = h_s
    while current.dim < d:
        h_r = orth_complement(current)
        bl = block_decompose(kmap, current)
        t_r = _kraus_superop(bl.r)
        sigma, local = peripheral_face_support(t_r, h_r.dim)
        h_t = SubspaceBasis(h_r.basis @ local.basis)
        stages.append(NfdStage(h_t, sigma))
        current = SubspaceBasis(np.hstack([current.basis, h_t.basis]))
        chain.append(current)
        nxt = is_invariant(kmap, current)
        if not nxt:
            raise NumericalDegeneracyError(
                "chain element failed the invariance check "
                f"(residual {nxt.residual:.3e}) after adding a stage with "
                f"sigma={sigma!r}; face extraction under-converged"
            )
        if len(stages) >= 2:
            prev, cur = stages[-2].sigma, stages[-1].sigma
            if not prev > cur + tau_spec:
                raise InternalInconsistencyError(
                    f"spectral radii failed to strictly decrease: {prev!r} -> {cur!r}"
                )
    gas = not stages or stages[0].sigma < 1.0 - tau_spec
    if gas:
        minimal = h_s
    else:
        minimal = SubspaceBasis(np.hstack([h_s.basis, stages[0].subspace.basis]))
    return NfdResult(h_s, tuple(stages), tuple(chain), gas, minimal)
