"""Hypothesis property tests for the algebraic and calculus invariants."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from defects.algebra import (
    AlternatingTensor,
    annihilator,
    contract_multivector,
    contract_vector,
    inner_fcontr,
    multi_indices,
    vector,
    wedge,
)
from defects.chains import Chain, Quadrature, affine_cell, box, integrate, stokes_residual
from defects.currents import ChainCurrent
from defects.fields import ComposedMap, FieldMap, Polynomial, pullback, random_test_form
from defects.fields.forms import pullback_explicit

MANY = settings(max_examples=1000, derandomize=True)
SOME = settings(max_examples=1000, derandomize=True)
seeds = st.integers(0, 2**32 - 1)


def tensor(rng, n, k, covariant=True):
    return AlternatingTensor(n, k, rng.normal(size=len(multi_indices(n, k))), covariant)


def close(a, b, tol=1e-12):
    scale = max(1.0, a.norm(), b.norm())
    return (a - b).norm() <= tol * scale


def degrees(draw_n=st.integers(1, 5)):
    return draw_n.flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(0, n), st.integers(0, n)))


class TestWedgeProperties:
    @MANY
    @given(degrees(), seeds)
    def test_graded_anticommutativity(self, nd, seed):
        n, p, q, _ = nd
        rng = np.random.default_rng(seed)
        a, b = tensor(rng, n, p), tensor(rng, n, q)
        lhs, rhs = wedge(a, b), wedge(b, a)
        assert close(lhs, rhs * (-1.0) ** (p * q))

    @MANY
    @given(degrees(), seeds)
    def test_associativity(self, nd, seed):
        n, p, q, r = nd
        rng = np.random.default_rng(seed)
        a, b, c = tensor(rng, n, p), tensor(rng, n, q), tensor(rng, n, r)
        assert close(wedge(wedge(a, b), c), wedge(a, wedge(b, c)))

    @MANY
    @given(degrees(), seeds)
    def test_antiderivation(self, nd, seed):
        n, p, q, _ = nd
        rng = np.random.default_rng(seed)
        v = vector(rng.normal(size=n))
        a, b = tensor(rng, n, p), tensor(rng, n, q)
        if p + q == 0:
            return
        lhs = contract_vector(v, wedge(a, b))
        first = wedge(contract_vector(v, a), b) if p else None
        second = wedge(a, contract_vector(v, b)) * (-1.0) ** p if q else None
        rhs = first if second is None else second if first is None else first + second
        assert close(lhs, rhs)

    @MANY
    @given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n), st.integers(0, n))), seeds)
    def test_multivector_contract_iterates(self, nk, seed):
        n, m, r = nk
        if m > r:
            return
        rng = np.random.default_rng(seed)
        vs = [vector(rng.normal(size=n)) for _ in range(m)]
        mv = vs[0]
        for v in vs[1:]:
            mv = wedge(mv, v)
        w = tensor(rng, n, r)
        it = w
        for v in vs:
            it = contract_vector(v, it)
        # (v1∧…∧vm)⌟w = vm⌟(…(v1⌟w))
        assert close(contract_multivector(mv, w), it)

    @MANY
    @given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))), seeds)
    def test_annihilator_of_decomposable(self, npd, seed):
        n, p = npd
        rng = np.random.default_rng(seed)
        phi = tensor(rng, n, 1)
        for _ in range(p - 1):
            phi = wedge(phi, tensor(rng, n, 1))
        if phi.norm() < 1e-6:
            return
        ann = annihilator(phi)
        assert ann.dimension == n - p
        for v in ann.basis:
            assert contract_vector(vector(v), phi).norm() <= 1e-12 * max(1.0, phi.norm()) * max(1.0, np.linalg.norm(v))

    @MANY
    @given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(0, n))), seeds)
    def test_inner_fcontr_relation(self, nrk, seed):
        n, r, k = nrk
        if k > r:
            return
        rng = np.random.default_rng(seed)
        v, w = tensor(rng, n, r, covariant=False), tensor(rng, n, k)
        c = inner_fcontr(v, w)
        for g_mu in multi_indices(n, r - k):
            g = AlternatingTensor.from_dict(n, r - k, {g_mu: 1.0})
            lhs = float(np.dot(g.coeffs, c.coeffs))
            rhs = float(np.dot(wedge(g, w).coeffs, v.coeffs))
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs), np.abs(v.coeffs).sum() * np.abs(w.coeffs).sum())


def quadratic_map(rng, n, scale=0.2):
    comps = []
    for a in range(n):
        terms = {tuple(int(i == a) for i in range(n)): 1.0, (0,) * n: rng.uniform(-0.1, 0.1)}
        for i in range(n):
            for j in range(i, n):
                ex = [0] * n
                ex[i] += 1
                ex[j] += 1
                terms[tuple(ex)] = terms.get(tuple(ex), 0.0) + rng.uniform(-scale, scale)
        comps.append(Polynomial(terms, n))
    return FieldMap(comps)


def rel_close(a, b, tol):
    return np.abs(a - b).max() <= tol * max(1.0, np.abs(b).max())


class TestCalculusProperties:
    @MANY
    @given(st.integers(2, 4).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 2))), seeds)
    def test_dd_zero(self, nd, seed):
        n, p = nd
        rng = np.random.default_rng(seed)
        w = random_test_form(rng, n, p, center=rng.uniform(-0.5, 0.5, n), radius=rng.uniform(0.5, 1.5))
        x = rng.uniform(-1.5, 1.5, (100, n))
        assert np.abs(w.d.d.evaluate(x)).max() < 1e-8

    @MANY
    @given(st.integers(2, 3).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 1))), seeds)
    def test_pullback_naturality(self, nd, seed):
        n, p = nd
        rng = np.random.default_rng(seed)
        f = quadratic_map(rng, n)
        w = random_test_form(rng, n, p, radius=2.5)
        x = rng.uniform(-0.4, 0.4, (20, n))
        lhs = pullback_explicit(f, w).d.evaluate(x)
        rhs = pullback(f, w.d).evaluate(x)
        assert rel_close(lhs, rhs, 1e-8)

    @SOME
    @given(st.integers(2, 3).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))), seeds)
    def test_pullback_functoriality(self, nd, seed):
        n, p = nd
        rng = np.random.default_rng(seed)
        f, g = quadratic_map(rng, n, 0.1), quadratic_map(rng, n, 0.1)
        w = random_test_form(rng, n, p, radius=2.5)
        x = rng.uniform(-0.3, 0.3, (20, n))
        lhs = pullback(ComposedMap(g, f), w).evaluate(x)
        rhs = pullback_explicit(f, pullback_explicit(g, w)).evaluate(x)
        assert rel_close(lhs, rhs, 1e-8)


class TestIntegrationProperties:
    @MANY
    @given(st.sampled_from([(2, 2), (3, 2), (3, 1), (2, 1)]), seeds)
    def test_stokes_affine_cells(self, nr, seed):
        n, r = nr
        rng = np.random.default_rng(seed)
        edges = rng.normal(size=(r, n)) * 0.8 + np.eye(r, n)
        if np.linalg.svd(edges, compute_uv=False).min() < 0.1:
            return
        cell = affine_cell(rng.uniform(-0.6, 0.0, n), edges, quadrature=Quadrature(20, 16))
        w = random_test_form(rng, n, r - 1, center=rng.uniform(-0.5, 0.5, n), radius=rng.uniform(0.4, 1.2))
        assert stokes_residual(w, cell) < 1e-8

    @MANY
    @given(st.sampled_from([(2, 2), (3, 2), (3, 1)]), seeds)
    def test_orientation_reversal(self, nr, seed):
        n, r = nr
        rng = np.random.default_rng(seed)
        edges = rng.normal(size=(r, n)) + 2 * np.eye(r, n)
        if np.linalg.svd(edges, compute_uv=False).min() < 0.1:
            return
        o = rng.uniform(-0.5, 0.0, n)
        w = random_test_form(rng, n, r, radius=1.0)
        a = integrate(w, affine_cell(o, edges, 1, Quadrature(8, 2)))
        b = integrate(w, affine_cell(o, edges, -1, Quadrature(8, 2)))
        assert a == -b

    @MANY
    @given(st.integers(2, 3), seeds)
    def test_current_linearity(self, n, seed):
        rng = np.random.default_rng(seed)
        T = ChainCurrent(Chain([box([-1.0] * n, [1.0] * n, quadrature=Quadrature(8, 2))]))
        a, b = random_test_form(rng, n, n), random_test_form(rng, n, n)
        s, t = rng.normal(size=2)
        lhs = T.evaluate(a * s + b * t)
        rhs = s * T.evaluate(a) + t * T.evaluate(b)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))
