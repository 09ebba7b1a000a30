import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qstab import (
    KrausMap,
    SubspaceBasis,
    did,
    did_dual_consistency,
    is_gas_did,
    is_gas_dual,
    nfd,
    transition_rates,
)
from qstab.linalg import projector_distance
from qstab.sampling import haar_unitary, random_density, random_invariant_channel

from conftest import SEVEN_GAMMAS, TOY_GAMMAS


class TestDidChains:
    def test_toy_from_symmetric_state_is_unsuccessful(self, toy, toy_plus, toy_minus):
        res = did(toy, toy_plus)
        assert not res.successful
        assert len(res.stages) == 2
        assert res.stages[0].subspace.equals(SubspaceBasis.from_indices(3, [2]))
        assert res.stages[1].subspace.equals(toy_minus)
        assert res.trapped is not None
        assert res.trapped.equals(toy_minus)

    def test_toy_from_first_two_levels(self, toy):
        res = did(toy, SubspaceBasis.from_indices(3, [0, 1]))
        assert res.successful
        assert len(res.stages) == 1
        assert res.stages[0].subspace.equals(SubspaceBasis.from_indices(3, [2]))
        # The only coupling is the decay of level 3, with weight g2.
        assert res.stages[0].gamma_min == pytest.approx(TOY_GAMMAS[2], abs=1e-12)
        assert res.stages[0].gamma_max == pytest.approx(TOY_GAMMAS[2], abs=1e-12)

    def test_seven_from_1234(self, seven, seven_1234):
        res = did(seven, seven_1234)
        assert res.successful
        assert len(res.stages) == 2
        assert res.stages[0].subspace.equals(SubspaceBasis.from_indices(7, [4]))
        assert res.stages[0].gamma_min == pytest.approx(SEVEN_GAMMAS[2], abs=1e-12)
        assert res.stages[1].subspace.equals(SubspaceBasis.from_indices(7, [5, 6]))
        assert res.stages[1].gamma_min == pytest.approx(SEVEN_GAMMAS[3], abs=1e-12)
        assert res.stages[1].gamma_max == pytest.approx(SEVEN_GAMMAS[4], abs=1e-12)

    def test_full_space(self, seven):
        res = did(seven, SubspaceBasis.full(7))
        assert res.successful
        assert res.stages == ()

    def test_rejects_non_invariant(self, seven):
        with pytest.raises(ValueError, match="not invariant"):
            did(seven, SubspaceBasis.from_indices(7, [4]))

    def test_decomposition_tiles_the_space(self, seven, seven_13):
        res = did(seven, seven_13)
        total = res.initial.dim + sum(st.subspace.dim for st in res.stages)
        assert total == 7


class TestBlockForm:
    def test_successful_zero_pattern(self, seven, seven_1234):
        res = did(seven, seven_1234)
        edges = np.concatenate([[0], np.cumsum(res.block_sizes)])
        n = len(res.block_sizes)
        for row in range(n):
            for col in range(n):
                blk = res.block_form[:, edges[row]:edges[row + 1], edges[col]:edges[col + 1]]
                if col >= row + 2 or (col == 0 and row >= 1):
                    assert np.linalg.norm(blk) < 1e-9

    def test_unsuccessful_final_column_zero(self, toy, toy_plus):
        res = did(toy, toy_plus)
        edges = np.concatenate([[0], np.cumsum(res.block_sizes)])
        n = len(res.block_sizes)
        last = n - 1
        for row in range(last):
            blk = res.block_form[:, edges[row]:edges[row + 1], edges[last]:edges[last + 1]]
            assert np.linalg.norm(blk) < 1e-9

    def test_basis_is_orthonormal(self, seven, seven_13):
        res = did(seven, seven_13)
        v = res.basis
        assert np.allclose(v.conj().T @ v, np.eye(7), atol=1e-12)


class TestGasDeciders:
    def test_seven_1234_gas(self, seven, seven_1234):
        assert is_gas_did(seven, seven_1234)
        assert is_gas_dual(seven, seven_1234)

    def test_seven_13_not_gas(self, seven, seven_13):
        assert not is_gas_did(seven, seven_13)
        assert not is_gas_dual(seven, seven_13)

    def test_full_space_gas(self, seven):
        assert is_gas_did(seven, SubspaceBasis.full(7))
        assert is_gas_dual(seven, SubspaceBasis.full(7))


class TestDualConsistency:
    def test_seven_1234(self, seven, seven_1234):
        assert did_dual_consistency(seven, seven_1234)

    def test_toy_first_two_levels(self, toy):
        assert did_dual_consistency(toy, SubspaceBasis.from_indices(3, [0, 1]))

    def test_full_space_vacuous(self, seven):
        assert did_dual_consistency(seven, SubspaceBasis.full(7))

    def test_rejects_unsuccessful(self, toy, toy_plus):
        with pytest.raises(ValueError, match="successful"):
            did_dual_consistency(toy, toy_plus)


class TestTransitionRates:
    def test_seven_bottleneck(self, seven, seven_1234):
        rates = transition_rates(did(seven, seven_1234))
        assert rates.bottleneck == pytest.approx(SEVEN_GAMMAS[2], abs=1e-12)

    def test_deterministic_one_step_transition(self):
        # Both levels map straight to level 1: the stage rate is exactly 1.
        k0 = np.zeros((2, 2), dtype=complex)
        k0[0, 0] = 1.0
        k1 = np.zeros((2, 2), dtype=complex)
        k1[0, 1] = 1.0
        kmap = KrausMap.from_matrices([k0, k1])
        res = did(kmap, SubspaceBasis.from_indices(2, [0]))
        assert res.successful
        rates = transition_rates(res)
        assert rates.per_stage == ((pytest.approx(1.0), pytest.approx(1.0)),)

    def test_rejects_unsuccessful(self, toy, toy_plus):
        with pytest.raises(ValueError, match="successful"):
            transition_rates(did(toy, toy_plus))


def _one_step_mass(kmap, res, stage_idx, rho_ambient):
    """Probability landing on the previous chain block after one step."""
    if stage_idx == 0:
        target = res.initial
    else:
        target = res.stages[stage_idx - 1].subspace
    return float(np.real(np.trace(target.projector() @ kmap.apply(rho_ambient))))


class TestOneStepBounds:
    def test_bounds_and_attainment_on_seven(self, seven, seven_1234):
        res = did(seven, seven_1234)
        rng = np.random.default_rng(99)
        for i, stage in enumerate(res.stages):
            v = stage.subspace.basis
            t = stage.subspace.dim
            for _ in range(10):
                w = random_density(t, rng)
                rho = v @ w @ v.conj().T
                mass = _one_step_mass(seven, res, i, rho)
                assert stage.gamma_min - 1e-10 <= mass <= stage.gamma_max + 1e-10
            # Extremal eigenvector states attain the bounds.
            s_cols = np.hstack(
                [res.initial.basis] + [s.subspace.basis for s in res.stages[:i]]
            )
            gram = np.zeros((t, t), dtype=complex)
            for p in np.einsum("ia,kij,jb->kab", s_cols.conj(), seven.ops, v):
                gram += p.conj().T @ p
            w_eig, vecs = np.linalg.eigh(gram)
            lo = v @ np.outer(vecs[:, 0], vecs[:, 0].conj()) @ v.conj().T
            hi = v @ np.outer(vecs[:, -1], vecs[:, -1].conj()) @ v.conj().T
            assert _one_step_mass(seven, res, i, lo) == pytest.approx(stage.gamma_min, abs=1e-10)
            assert _one_step_mass(seven, res, i, hi) == pytest.approx(stage.gamma_max, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_osr_independence_of_chains(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(3, 7))
    m = int(rng.integers(1, d))
    kmap, h_s, _ = random_invariant_channel(d, (m,), int(rng.integers(2, 5)), rng)
    base = did(kmap, h_s)
    u = haar_unitary(kmap.n_kraus, rng)
    remixed = did(kmap.remix(u), h_s)
    assert base.successful == remixed.successful
    assert len(base.stages) == len(remixed.stages)
    for a, b in zip(base.stages, remixed.stages):
        assert projector_distance(a.subspace, b.subspace) <= 1e-8


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_three_deciders_agree(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 6))
    m = int(rng.integers(1, d))
    structure = ["coupled", "decoupled", "trapped_tail"][seed % 3]
    if structure == "trapped_tail" and d - m < 2:
        structure = "decoupled"
    kmap, h_s, _ = random_invariant_channel(
        d, (m,), int(rng.integers(2, 5)), rng, structure=structure
    )
    verdicts = {
        is_gas_did(kmap, h_s),
        is_gas_dual(kmap, h_s),
        nfd(kmap, h_s).is_gas,
    }
    assert len(verdicts) == 1
