"""Asymptotic convergence probabilities onto orthogonal invariant
subspaces inside a GAS subspace, with the dual limit operators and an
independent brute-force iteration oracle.

For a split H = H_S + H_R with H_S GAS and invariant parts H_{S_i}
tiling (or contained in) H_S, the limit probability starting from rho is

    p_i = Tr(Pi_i rho_S) + Tr(Pi_i T_SR((I - T_R)^{-1} rho_R)),

solved as a linear system on the vectorized R operator space.
"""

import warnings

import numpy as np
from dataclasses import dataclass

from .channel import (
    KrausMap,
    ReducedMaps,
    check_density,
    is_invariant,
    reduced_maps,
    superoperator,
    unvec,
    vec,
)
from .did import is_gas_did
from .errors import InternalInconsistencyError, NumericalDegeneracyError
from .linalg import SubspaceBasis, hermitian_part
from .tolerances import ORTH_TOL, RANK_RTOL

__all__ = [
    "AsymptoticReport",
    "asymptotic_probability",
    "limit_dual_projection",
    "iterate_oracle",
    "dual_step_identity_check",
    "analyze_asymptotics",
]


def _prepare(
    kmap: KrausMap,
    parts: list[SubspaceBasis],
    within: SubspaceBasis | None,
    assume_gas: bool,
) -> tuple[SubspaceBasis, ReducedMaps]:
    if not parts:
        raise ValueError("at least one target subspace is required")
    d = kmap.dim
    for part in parts:
        if part.ambient_dim != d:
            raise ValueError("part ambient dimension does not match the channel")
        chk = is_invariant(kmap, part)
        if not chk:
            raise ValueError(
                f"target subspace is not invariant (residual {chk.residual:.3e})"
            )
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            overlap = np.linalg.norm(parts[i].basis.conj().T @ parts[j].basis)
            if overlap > ORTH_TOL * d:
                raise ValueError(
                    f"target subspaces {i} and {j} are not orthogonal "
                    f"(overlap {overlap:.3e})"
                )
    if within is None:
        h_s = SubspaceBasis(np.hstack([p.basis for p in parts]))
    else:
        h_s = within
        for i, part in enumerate(parts):
            if not h_s.contains(part):
                raise ValueError(f"target subspace {i} is not inside the GAS subspace")
    if not assume_gas and not is_gas_did(kmap, h_s):
        raise ValueError(
            "the enclosing subspace is not GAS; the geometric series for the "
            "asymptotic probabilities diverges"
        )
    if not dual_step_identity_check(kmap, parts, within=h_s):
        raise ValueError(
            "one-step dual identity violated for the given parts; "
            "a part is not invariant relative to the split, or the remainder "
            "of the enclosing subspace is not invariant"
        )
    return h_s, reduced_maps(kmap, h_s)


def _local_projectors(parts: list[SubspaceBasis], red: ReducedMaps) -> list[np.ndarray]:
    bs = red.s_basis.basis
    return [
        (bs.conj().T @ p.basis) @ (bs.conj().T @ p.basis).conj().T for p in parts
    ]


def dual_step_identity_check(
    kmap: KrausMap,
    parts: list[SubspaceBasis],
    within: SubspaceBasis | None = None,
    tol: float = 1e-10,
) -> bool:
    """Verify T^*(Pi_i) = Pi_i + T_SR^*(Pi_i) blockwise for every part.

    The identity holds whenever each part and the remainder of the
    enclosing subspace are invariant; it gates the probability formula.
    """
    if within is None:
        within = SubspaceBasis(np.hstack([p.basis for p in parts]))
    red = reduced_maps(kmap, within)
    bs, br = red.s_basis.basis, red.r_basis.basis
    for part, pi_loc in zip(parts, _local_projectors(parts, red)):
        dual = kmap.apply_dual(part.projector())
        expected = part.projector()
        if red.r_basis.dim > 0:
            t_sr_dual = red.t_sr.conj().T @ vec(pi_loc)
            expected = expected + br @ unvec(t_sr_dual, red.r_basis.dim) @ br.conj().T
        if np.linalg.norm(dual - expected) > tol * max(1.0, float(np.linalg.norm(dual))):
            return False
    return True


def asymptotic_probability(
    kmap: KrausMap,
    parts: list[SubspaceBasis],
    rho: np.ndarray,
    within: SubspaceBasis | None = None,
    assume_gas: bool = False,
) -> np.ndarray:
    """Limit probabilities lim_n Tr(Pi_i T^n(rho)) for each part.

    Raw values are returned unclamped; see AsymptoticReport for the
    clamped report layer.
    """
    h_s, red = _prepare(kmap, parts, within, assume_gas)
    rho = check_density(rho, kmap.dim)
    bs, br = red.s_basis.basis, red.r_basis.basis
    rho_s = bs.conj().T @ rho @ bs
    pis = _local_projectors(parts, red)
    r = red.r_basis.dim
    if r == 0:
        flow = np.zeros_like(rho_s)
    else:
        rho_r = br.conj().T @ rho @ br
        sys = np.eye(r * r) - red.t_r
        try:
            resolvent = np.linalg.solve(sys, vec(rho_r))
        except np.linalg.LinAlgError as exc:
            raise NumericalDegeneracyError(
                "I - T_R is singular; the enclosing subspace cannot be GAS"
            ) from exc
        flow = unvec(red.t_sr @ resolvent, red.s_basis.dim)
    return np.array(
        [float(np.real(np.trace(pi @ (rho_s + flow)))) for pi in pis]
    )


def limit_dual_projection(
    kmap: KrausMap,
    parts: list[SubspaceBasis],
    within: SubspaceBasis | None = None,
    assume_gas: bool = False,
) -> list[np.ndarray]:
    """Limits of T^{*n}(Pi_i): the operators whose expectations give the
    asymptotic probabilities for arbitrary initial states."""
    h_s, red = _prepare(kmap, parts, within, assume_gas)
    br = red.r_basis.basis
    r = red.r_basis.dim
    duals = []
    for part, pi_loc in zip(parts, _local_projectors(parts, red)):
        limit = part.projector().astype(complex)
        if r > 0:
            rhs = red.t_sr.conj().T @ vec(pi_loc)
            sys = np.eye(r * r) - red.t_r.conj().T
            try:
                w = np.linalg.solve(sys, rhs)
            except np.linalg.LinAlgError as exc:
                raise NumericalDegeneracyError(
                    "I - T_R^* is singular; the enclosing subspace cannot be GAS"
                ) from exc
            limit = limit + br @ unvec(w, r) @ br.conj().T
        limit = hermitian_part(limit)
        _check_limit_dual(kmap, limit)
        duals.append(limit)
    return duals


def _check_limit_dual(kmap: KrausMap, limit: np.ndarray) -> None:
    fixed_gap = np.linalg.norm(kmap.apply_dual(limit) - limit)
    if fixed_gap > 1e-8 * max(1.0, float(np.linalg.norm(limit))):
        raise InternalInconsistencyError(
            f"limit dual operator is not a fixed point of the dual map "
            f"(gap {fixed_gap:.3e})"
        )
    w = np.linalg.eigvalsh(limit)
    if w[0] < -RANK_RTOL * max(1.0, float(w[-1])) or w[-1] > 1.0 + RANK_RTOL:
        raise InternalInconsistencyError(
            f"limit dual operator violates 0 <= L <= I (eigenvalues in "
            f"[{w[0]:.3e}, {w[-1]:.3e}])"
        )


def iterate_oracle(kmap: KrausMap, rho: np.ndarray, n_steps: int) -> np.ndarray:
    """T^n(rho) by n repeated applications of the channel, with the
    trace monitored at every step.  Brute-force check of the limits."""
    if not kmap.is_tp():
        raise ValueError("the iteration oracle requires a trace-preserving map")
    rho = check_density(rho, kmap.dim)
    d = kmap.dim
    s = superoperator(kmap)
    v = vec(rho)
    diag_idx = np.arange(d) * (d + 1)
    for step in range(int(n_steps)):
        v = s @ v
        drift = abs(float(np.real(np.sum(v[diag_idx]))) - 1.0)
        if drift > 1e-9:
            raise InternalInconsistencyError(
                f"trace drifted by {drift:.3e} at step {step + 1}"
            )
    return unvec(v, d)


@dataclass(frozen=True)
class AsymptoticReport:
    """Limit dual operators for a set of orthogonal invariant targets,
    with probability evaluation for arbitrary initial states."""

    targets: tuple[SubspaceBasis, ...]
    enclosing: SubspaceBasis
    limit_duals: tuple[np.ndarray, ...]

    def raw_probabilities(self, rho: np.ndarray) -> np.ndarray:
        rho = check_density(rho, self.enclosing.ambient_dim)
        return np.array(
            [float(np.real(np.trace(l @ rho))) for l in self.limit_duals]
        )

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        """Probabilities clamped to [0, 1]; clamping beyond 1e-8 warns."""
        raw = self.raw_probabilities(rho)
        clamped = np.clip(raw, 0.0, 1.0)
        worst = float(np.max(np.abs(raw - clamped))) if raw.size else 0.0
        if worst > 1e-8:
            warnings.warn(
                f"probabilities clamped by up to {worst:.3e}; "
                "this indicates a numerical problem",
                stacklevel=2,
            )
        return clamped

    def uncovered_mass(self, rho: np.ndarray) -> float:
        """Probability mass not absorbed by any target (nonzero only when
        the targets do not tile the enclosing GAS subspace)."""
        return 1.0 - float(np.sum(self.raw_probabilities(rho)))


def analyze_asymptotics(
    kmap: KrausMap,
    parts: list[SubspaceBasis],
    within: SubspaceBasis | None = None,
    assume_gas: bool = False,
) -> AsymptoticReport:
    duals = limit_dual_projection(kmap, parts, within=within, assume_gas=assume_gas)
    if within is None:
        within = SubspaceBasis(np.hstack([p.basis for p in parts]))
    return AsymptoticReport(tuple(parts), within, tuple(duals))
