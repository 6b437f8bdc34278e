import itertools

import numpy as np
import pytest

from defects.algebra import (
    AlternatingTensor,
    Subspace,
    annihilator,
    check_multi_index,
    complement,
    contract_multivector,
    contract_vector,
    dx,
    e,
    inner_fcontr,
    is_decomposable,
    kernel,
    merge_sign,
    multi_indices,
    vector,
    wedge,
)


def random_tensor(rng, n, k, covariant=True):
    return AlternatingTensor(n, k, rng.normal(size=len(multi_indices(n, k))), covariant)


def perm_sign(p):
    p = list(p)
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def full_array(t):
    """Dense antisymmetric array of a k-covector (independent oracle)."""
    out = np.zeros((t.n,) * t.degree)
    for mu, c in zip(t.basis, t.coeffs):
        for p in itertools.permutations(range(t.degree)):
            out[tuple(mu[i] for i in p)] = perm_sign(p) * c
    return out


class TestMultiIndex:
    def test_counts(self):
        assert len(multi_indices(4, 2)) == 6
        assert multi_indices(3, 0) == ((),)

    def test_check_rejects_bad(self):
        with pytest.raises(ValueError):
            check_multi_index((1, 0), 3)
        with pytest.raises(ValueError):
            check_multi_index((0, 3), 3)

    def test_merge_sign(self):
        assert merge_sign((0,), (1,)) == 1
        assert merge_sign((1,), (0,)) == -1
        assert merge_sign((0, 2), (1,)) == -1
        assert merge_sign((0,), (0,)) == 0

    def test_complement(self):
        assert complement((1,), 3) == (0, 2)
        assert complement((), 2) == (0, 1)


class TestWedge:
    def test_basis(self):
        w = wedge(dx(0, 3), dx(1, 3))
        assert w.components() == {(0, 1): 1.0}

    def test_repeated_factor(self):
        assert wedge(dx(0, 3), dx(0, 3)).norm() == 0.0

    def test_sum_factor(self):
        w = wedge(dx(0, 3) + dx(1, 3), dx(1, 3))
        # 2x2 determinant oracle: (a∧b)_{01} = a0 b1 - a1 b0 = 1
        assert w[(0, 1)] == pytest.approx(1.0)
        assert w[(0, 2)] == 0.0 and w[(1, 2)] == 0.0

    def test_overflow_is_zero(self):
        w = wedge(random_tensor(np.random.default_rng(0), 3, 2), random_tensor(np.random.default_rng(1), 3, 2))
        assert w.degree == 4 and w.coeffs.size == 0

    def test_matches_dense_oracle(self, rng):
        a, b = random_tensor(rng, 4, 1), random_tensor(rng, 4, 2)
        A, B = full_array(a), full_array(b)
        # (a∧b)(u,v,w) = Σ over shuffles; dense: antisymmetrize a⊗b with factor 1/(1!2!)
        T = np.einsum("i,jk->ijk", A, B)
        alt = np.zeros_like(T)
        for p in itertools.permutations(range(3)):
            alt += perm_sign(p) * np.transpose(T, p)
        alt /= 2.0
        w = wedge(a, b)
        for mu in w.basis:
            assert w[mu] == pytest.approx(alt[mu], abs=1e-12)

    def test_evaluation_on_vectors(self):
        w = wedge(dx(0, 3), dx(1, 3))
        assert w([1, 0, 0], [0, 1, 0]) == pytest.approx(1.0)
        assert w([0, 1, 0], [1, 0, 0]) == pytest.approx(-1.0)


class TestContraction:
    def test_basis(self):
        w = wedge(dx(0, 3), dx(1, 3))
        assert contract_vector(e(0, 3), w).allclose(dx(1, 3))
        assert contract_vector(e(1, 3), w).allclose(-dx(0, 3))

    def test_matches_evaluation(self, rng):
        v, w = vector(rng.normal(size=3)), random_tensor(rng, 3, 2)
        c = contract_vector(v, w)
        for j in range(3):
            u = np.eye(3)[j]
            assert c(u) == pytest.approx(w(v.coeffs, u), abs=1e-12)

    def test_multivector(self):
        v = wedge(e(0, 3), e(1, 3))
        vol = wedge(wedge(dx(0, 3), dx(1, 3)), dx(2, 3))
        assert contract_multivector(v, vol).allclose(dx(2, 3))
        assert contract_multivector(v, wedge(dx(0, 3), dx(1, 3))).coeffs[0] == pytest.approx(1.0)
        assert contract_multivector(wedge(e(0, 3), e(1, 3)), wedge(dx(1, 3), dx(2, 3))).norm() == 0.0

    def test_multivector_iterated(self, rng):
        u, v = vector(rng.normal(size=4)), vector(rng.normal(size=4))
        w = random_tensor(rng, 4, 3)
        lhs = contract_multivector(wedge(u, v), w)
        # (u∧v)⌟w (x) = w(u, v, x) = (v⌟(u⌟w))(x)
        rhs = contract_vector(v, contract_vector(u, w))
        assert lhs.allclose(rhs, 1e-12)

    def test_inner_fcontr(self):
        v = wedge(wedge(e(0, 3), e(1, 3)), e(2, 3))
        r = inner_fcontr(v, dx(2, 3))
        assert r.allclose(wedge(e(0, 3), e(1, 3)))
        assert inner_fcontr(v, AlternatingTensor(3, 0, [1.0])).allclose(v)
        assert inner_fcontr(wedge(e(0, 3), e(1, 3)), wedge(dx(0, 3), dx(1, 3))).coeffs[0] == pytest.approx(1.0)

    def test_inner_fcontr_defining_relation(self, rng):
        v = random_tensor(rng, 4, 3, covariant=False)
        w = random_tensor(rng, 4, 1)
        r = inner_fcontr(v, w)
        for i in range(4):
            for j in range(i + 1, 4):
                g = wedge(dx(i, 4), dx(j, 4))
                assert g.pair(r) == pytest.approx(wedge(g, w).pair(v), abs=1e-12)


class TestAnnihilator:
    def test_axis(self):
        s = annihilator(wedge(dx(0, 3), dx(1, 3)))
        assert s.same_as(Subspace(3, np.array([[0.0, 0.0, 1.0]])))

    def test_contact_form_point(self):
        # dz - y dx at y = 2
        phi = AlternatingTensor.from_dict(3, 1, {(0,): -2.0, (2,): 1.0})
        expected = Subspace(3, np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 2.0]]))
        assert annihilator(phi).same_as(expected)

    def test_dimension_and_contraction(self, rng):
        a, b = random_tensor(rng, 4, 1), random_tensor(rng, 4, 1)
        phi = wedge(a, b)
        s = annihilator(phi)
        assert s.dimension == 2
        for v in s.basis:
            assert contract_vector(vector(v), phi).norm() < 1e-12

    def test_kernel(self):
        K = kernel(np.array([[1.0, 2.0, 3.0]]))
        assert K.shape == (2, 3)
        assert np.allclose(np.array([[1.0, 2.0, 3.0]]) @ K.T, 0.0)


class TestDecomposability:
    def test_one_forms(self, rng):
        for _ in range(5):
            assert is_decomposable(random_tensor(rng, 4, 1))

    def test_symplectic_is_not(self):
        w = wedge(dx(0, 4), dx(1, 4)) + wedge(dx(2, 4), dx(3, 4))
        assert not is_decomposable(w)

    def test_codimension_one(self, rng):
        for _ in range(5):
            assert is_decomposable(random_tensor(rng, 3, 2))

    def test_scale_invariant(self):
        w = wedge(dx(0, 4), dx(1, 4)) + wedge(dx(2, 4), dx(3, 4))
        assert not is_decomposable(w * 1e-8)
        assert is_decomposable(wedge(dx(0, 4), dx(1, 4)) * 1e8)
