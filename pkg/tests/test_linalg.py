import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qstab import (
    SubspaceBasis,
    block_decompose,
    column_space,
    eig,
    kernel,
    orth_complement,
    psd_cone_project,
    subspace_sum,
)
from qstab.linalg import projector_distance
from qstab.sampling import random_tp_channel

TOL = 1e-10


def rng_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def gram_schmidt(cols):
    """Independent orthonormalization oracle (classical Gram-Schmidt)."""
    out = []
    for v in cols.T:
        w = v.astype(complex).copy()
        for u in out:
            w -= np.vdot(u, w) * u
        n = np.linalg.norm(w)
        if n > 1e-12:
            out.append(w / n)
    return np.column_stack(out)


class TestSubspaceBasis:
    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            SubspaceBasis(np.array([[1.0], [1.0]]))

    def test_zero_and_full(self):
        z = SubspaceBasis.zero(4)
        assert z.dim == 0 and z.ambient_dim == 4
        f = SubspaceBasis.full(4)
        assert f.dim == 4
        assert np.allclose(z.projector(), 0)
        assert np.allclose(f.projector(), np.eye(4))

    def test_equality_is_basis_independent(self):
        b1 = SubspaceBasis.from_indices(3, [0, 1])
        u = np.array([[1, 1], [1, -1], [0, 0]]) / np.sqrt(2)
        b2 = SubspaceBasis(u)
        assert b1.equals(b2)

    def test_immutable(self):
        b = SubspaceBasis.full(2)
        with pytest.raises(ValueError):
            b.basis[0, 0] = 5.0


class TestKernel:
    def test_identity_has_trivial_kernel(self):
        assert kernel(np.eye(3)).dim == 0

    def test_zero_matrix_gives_full_space(self):
        assert kernel(np.zeros((2, 2))).dim == 2

    def test_seven_level_stacked_coupling_blocks(self, seven, seven_1234):
        # Joint kernel of the S-to-R coupling blocks from span{e1..e4}:
        # only level 5 feeds the subspace, so the kernel is span{e6,e7}.
        bl = block_decompose(seven, seven_1234)
        stacked = bl.p.reshape(-1, bl.r_dim)
        ker_local = kernel(stacked)
        ambient = SubspaceBasis(bl.r_basis.basis @ ker_local.basis)
        assert ambient.equals(SubspaceBasis.from_indices(7, [5, 6]))


class TestColumnSpace:
    def test_rank_one_diagonal(self):
        got = column_space(np.diag([1.0, 0.0, 0.0]))
        assert got.equals(SubspaceBasis.from_indices(3, [0]))

    def test_toy_invariant_pure_state_support(self, toy_plus):
        rho = toy_plus.basis @ toy_plus.basis.conj().T
        assert column_space(rho).equals(toy_plus)

    def test_rank_two_psd_support_matches_gram_schmidt(self):
        rng = np.random.default_rng(7)
        b = rng_complex(rng, 4, 2)
        got = column_space(b @ b.conj().T)
        expected = SubspaceBasis(gram_schmidt(b))
        assert got.dim == 2
        assert got.equals(expected)


class TestSubspaceSum:
    def test_disjoint_axes(self):
        s = subspace_sum(SubspaceBasis.from_indices(3, [0]), SubspaceBasis.from_indices(3, [1]))
        assert s.equals(SubspaceBasis.from_indices(3, [0, 1]))

    def test_idempotent(self):
        e1 = SubspaceBasis.from_indices(3, [0])
        assert subspace_sum(e1, e1).equals(e1)

    def test_plane_from_conjugate_lines(self):
        p = SubspaceBasis(np.array([[1.0], [1.0], [0.0]]) / np.sqrt(2))
        m = SubspaceBasis(np.array([[1.0], [-1.0], [0.0]]) / np.sqrt(2))
        assert subspace_sum(p, m).equals(SubspaceBasis.from_indices(3, [0, 1]))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            subspace_sum(SubspaceBasis.full(2), SubspaceBasis.full(3))


class TestOrthComplement:
    def test_axis_line(self):
        c = orth_complement(SubspaceBasis.from_indices(3, [0]))
        assert c.equals(SubspaceBasis.from_indices(3, [1, 2]))

    def test_full_space(self):
        assert orth_complement(SubspaceBasis.full(3)).dim == 0

    def test_toy_complement(self, toy_plus, toy_minus):
        expected = subspace_sum(toy_minus, SubspaceBasis.from_indices(3, [2]))
        assert orth_complement(toy_plus).equals(expected)


class TestEig:
    def test_diagonal(self):
        data = eig(np.diag([0.5, 0.25]))
        assert sorted(np.real(data.eigenvalues)) == pytest.approx([0.25, 0.5])
        assert data.spectral_radius == pytest.approx(0.5)

    def test_jordan_block_generalized_space(self):
        j = np.array([[1.0, 1.0], [0.0, 1.0]])
        space = eig(j).generalized_eigenspace(1.0, power=2)
        assert space.dim == 2

    def test_jordan_block_plain_eigenspace_is_smaller(self):
        j = np.array([[1.0, 1.0], [0.0, 1.0]])
        assert eig(j).generalized_eigenspace(1.0, power=1).dim == 1

    def test_generalized_space_excludes_nearby_eigenvalues(self):
        rng = np.random.default_rng(3)
        q, _ = np.linalg.qr(rng_complex(rng, 12, 12))
        vals = np.array([1.0] + [0.95] * 5 + [0.9] * 6)
        a = q @ np.diag(vals) @ q.conj().T
        assert eig(a).generalized_eigenspace(1.0).dim == 1

    def test_toy_reduced_scalar_block(self, toy):
        # After absorbing span{e1,e2}, the remainder is the single level 3
        # and the reduced map is multiplication by 1 - g2.
        from qstab import reduced_maps

        red = reduced_maps(toy, SubspaceBasis.from_indices(3, [0, 1]))
        data = eig(red.t_r)
        assert data.eigenvalues.shape == (1,)
        assert data.eigenvalues[0] == pytest.approx(0.8, abs=1e-12)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            eig(np.zeros((2, 3)))


class TestPsdConeProject:
    def test_clamps_negative_eigenvalue(self):
        got = psd_cone_project(np.diag([1.0, -1.0]))
        assert np.allclose(got, np.diag([1.0, 0.0]), atol=1e-12)

    def test_psd_fixed_point(self):
        rng = np.random.default_rng(11)
        b = rng_complex(rng, 3, 3)
        p = b @ b.conj().T
        assert np.allclose(psd_cone_project(p), p, atol=1e-10 * np.linalg.norm(p))

    def test_symmetric_offdiagonal(self):
        got = psd_cone_project(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(got, 0.5 * np.ones((2, 2)), atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            psd_cone_project(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_kernel_range_duality(seed, m, n):
    rng = np.random.default_rng(seed)
    a = rng_complex(rng, m, n)
    if seed % 3 == 0:  # exercise rank-deficient inputs too
        a[:, -1] = a[:, 0] if n > 1 else 0.0
    assert kernel(a).dim + column_space(a.conj().T).dim == n


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(0, 6))
def test_complement_involution(seed, d, m):
    m = min(m, d)
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng_complex(rng, d, d))
    sub = SubspaceBasis(q[:, :m])
    comp = orth_complement(sub)
    assert sub.dim + comp.dim == d
    assert orth_complement(comp).equals(sub)
    assert projector_distance(sub, orth_complement(comp)) <= TOL * d


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_psd_projection_properties(seed, d):
    rng = np.random.default_rng(seed)
    h = rng_complex(rng, d, d)
    h = (h + h.conj().T) / 2
    p = psd_cone_project(h)
    w = np.linalg.eigvalsh(p)
    assert w[0] >= -TOL
    assert np.allclose(psd_cone_project(p), p, atol=1e-9 * max(1.0, np.linalg.norm(p)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 16))
def test_eigenvalue_product_matches_determinant(seed, d):
    rng = np.random.default_rng(seed)
    a = rng_complex(rng, d, d) / np.sqrt(d)
    det = np.linalg.det(a)
    prod = np.prod(eig(a).eigenvalues)
    assert abs(prod - det) <= 1e-8 * max(1.0, abs(det))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4), st.integers(1, 3))
def test_channel_superop_generalized_space_contains_fixed_points(seed, d, k):
    # The generalized radius-eigenspace of a TP channel contains vec(I)'s
    # dual partner and has dimension at least 1.
    rng = np.random.default_rng(seed)
    kmap = random_tp_channel(d, k, rng)
    from qstab import superoperator

    data = eig(superoperator(kmap))
    assert data.spectral_radius == pytest.approx(1.0, abs=1e-8)
    assert data.generalized_eigenspace(1.0).dim >= 1
