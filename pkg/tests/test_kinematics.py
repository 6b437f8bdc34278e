import numpy as np
import pytest

from defects.chains import Chain, Quadrature, affine_cell, segment
from defects.currents import BoundaryCurrent, ChainCurrent, DiracCurrent, DualLieCurrent
from defects.currents import test_form_battery as battery
from defects.fields import Box, CoefficientForm, Polynomial, VectorField, lie_derivative, pullback
from defects.fields import test_form as bump_form
from defects.kinematics import (
    Flow,
    current_rate_fd,
    dual_lie_derivative,
    inverse_velocity_check,
    lie_derivative_fd,
    linear,
    pushforward_current,
    rotation_z,
    shear,
    structure_form_rate,
    structure_form_rate_fd,
    translation,
)

FINE = Quadrature(20, 8)


def rot(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])


def expm_series(A, terms=40):
    out, term = np.eye(len(A)), np.eye(len(A))
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


def poly_one_form():
    p = lambda t: Polynomial({tuple(k): v for k, v in t.items()}, 3)
    return CoefficientForm(3, 1, {(0,): p({(0, 1, 0): 1.0, (0, 0, 2): 0.3}), (2,): p({(1, 1, 0): -0.5, (0, 0, 0): 0.2})})


@pytest.fixture(scope="module")
def pts():
    return np.random.default_rng(7).uniform(-1, 1, (8, 3))


class TestFlowMap:
    def test_constant_velocity_exact(self, pts):
        c = np.array([0.3, -0.2, 0.5])
        F = Flow(translation(c), (0, 1))
        assert np.abs(F.map(0.8, 0.1, pts) - (pts + 0.7 * c)).max() < 1e-12

    def test_rotation_oracle(self, pts):
        F = Flow(rotation_z(), (0, 2), dt=1e-3)
        assert np.abs(F.map(1.7, 0.2, pts) - pts @ rot(1.5).T).max() < 1e-9

    def test_backward(self, pts):
        F = Flow(rotation_z(), (0, 2), dt=1e-3)
        assert np.abs(F.map(0.2, 1.7, pts) - pts @ rot(-1.5).T).max() < 1e-9

    def test_identity(self, pts):
        F = Flow(shear(), (0, 1))
        assert np.array_equal(F.map(0.4, 0.4, pts), pts)

    def test_composition_and_inverse(self):
        rng = np.random.default_rng(11)
        F = Flow(shear(multiplier=(1.0, 0.5)), (0, 1), dt=1e-2)
        for _ in range(50):
            tau, t, s = rng.uniform(0, 1, 3)
            x = rng.uniform(-1, 1, (1, 3))
            assert np.abs(F.map(tau, t, F.map(t, s, x)) - F.map(tau, s, x)).max() < 1e-7
            assert np.abs(F.map(t, tau, F.map(tau, t, x)) - x).max() < 1e-7

    def test_time_outside_interval(self, pts):
        with pytest.raises(ValueError):
            Flow(shear(), (0, 1)).map(1.5, 0.0, pts)

    def test_leaves_box(self):
        F = Flow(translation([1.0, 0, 0]), (0, 1), box=Box([-1, -1, -1], [1, 1, 1]))
        with pytest.raises(ValueError):
            F.map(1.0, 0.0, [[0.5, 0, 0]])

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            Flow(shear(), (1, 1))


class TestTangent:
    def test_constant(self, pts):
        J = Flow(translation([1.0, 2.0, 0.0]), (0, 1)).tangent(0.9, 0.0, pts)
        assert np.abs(J - np.eye(3)).max() < 1e-9

    def test_rotation(self, pts):
        J = Flow(rotation_z(), (0, 1)).tangent(0.9, 0.3, pts)
        assert np.abs(J - rot(0.6)).max() < 1e-8

    def test_linear_matches_exponential(self, pts):
        A = np.array([[0.1, 0.4, 0.0], [-0.3, 0.2, 0.5], [0.0, 0.1, -0.2]])
        J = Flow(linear(A), (0, 1)).tangent(0.8, 0.1, pts)
        assert np.abs(J - expm_series(0.7 * A)).max() < 1e-6

    def test_time_dependent_linear(self, pts):
        # m(t) = 1 + t, so Φ_{τ,t} = exp(A ∫_t^τ m)
        A = np.array([[0.0, 0.5, 0.0], [0.2, 0.0, 0.0], [0.0, 0.0, 0.3]])
        F = Flow(linear(A, multiplier=(1.0, 1.0)), (0, 1))
        J = F.tangent(0.9, 0.2, pts)
        assert np.abs(J - expm_series((0.7 + 0.5 * (0.81 - 0.04)) * A)).max() < 1e-6


class TestInverseVelocity:
    def test_shear(self):
        F = Flow(shear(multiplier=(1.0, 0.5)), (0, 1))
        x = np.random.default_rng(3).uniform(-1, 1, (5, 3))
        for t in (0.0, 0.37, 1.0):
            assert inverse_velocity_check(F, t, x) < 1e-6

    def test_zero(self, pts):
        assert inverse_velocity_check(Flow(translation([0, 0, 0]), (0, 1)), 0.5, pts) == 0.0

    def test_rotation(self, pts):
        assert inverse_velocity_check(Flow(rotation_z(), (0, 1)), 0.5, pts) < 1e-8


class TestFormRates:
    def test_zero_velocity(self, pts):
        rate = structure_form_rate(Flow(translation([0, 0, 0]), (0, 1)), poly_one_form(), 0.5)
        assert np.abs(rate.evaluate(pts)).max() == 0.0

    def test_translation_bump_dz(self):
        c = np.array([0.4, -0.3, 0.2])
        phi = bump_form([0.1, 0, 0], 1.2, {(2,): 1.0}, 1)
        rate = structure_form_rate(Flow(translation(c), (0, 1)), phi, 0.5)
        x = np.random.default_rng(1).uniform(-0.6, 0.6, (10, 3))
        bump = phi.coefficient_fields()[2]
        expect = -bump.gradient(x) @ c
        got = rate.evaluate(x)
        assert np.abs(got[:, 2] - expect).max() < 1e-12 and np.abs(got[:, :2]).max() == 0.0

    def test_rate_matches_fd(self, pts):
        F = Flow(shear(multiplier=(1.0, 0.5)), (0, 1))
        phi = poly_one_form()
        exact = structure_form_rate(F, phi, 0.4).evaluate(pts)
        fd = structure_form_rate_fd(F, phi, 0.4, pts)
        assert np.abs(fd - exact).max() < 1e-4 * max(1.0, np.abs(exact).max())

    def test_defect_rate_commutes_with_d(self, pts):
        F = Flow(shear(), (0, 1))
        phi = poly_one_form()
        lhs = structure_form_rate(F, phi, 0.3).d.evaluate(pts)
        rhs = structure_form_rate(F, phi.d, 0.3).evaluate(pts)
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_lie_fd(self, pts):
        F = Flow(shear(multiplier=(1.0, 0.5)), (0, 1))
        om = poly_one_form()
        fd = lie_derivative_fd(F, om, 0.6, pts)
        exact = lie_derivative(F.velocity.at(0.6), om).evaluate(pts)
        assert np.abs(fd - exact).max() < 1e-4 * max(1.0, np.abs(exact).max())

    def test_homotopy_integral(self, pts):
        F = Flow(shear(multiplier=(1.0, 0.5)), (0, 1))
        om, t, t1, t2 = poly_one_form(), 0.5, 0.2, 0.8
        lhs = pullback(F.as_map(t2, t), om).evaluate(pts) - pullback(F.as_map(t1, t), om).evaluate(pts)
        g, gw = np.polynomial.legendre.leggauss(10)
        taus, ws = 0.5 * (t2 - t1) * g + 0.5 * (t2 + t1), 0.5 * (t2 - t1) * gw
        rhs = sum(w * pullback(F.as_map(s, t), lie_derivative(F.velocity.at(s), om)).evaluate(pts)
                  for s, w in zip(taus, ws))
        assert np.abs(lhs - rhs).max() < 1e-5


class TestCurrentTransport:
    def test_pushforward_identity(self):
        T = ChainCurrent(Chain([segment([0, 0, -1], [0, 0, 1])]))
        w = battery(3, 1, count=1)[0]
        assert pushforward_current(Flow(shear(), (0, 1)), T, 0.3, 0.3).evaluate(w) == T.evaluate(w)

    def test_image_of_structure_current(self):
        F = Flow(rotation_z(), (0, 1), dt=1e-2)
        sq = affine_cell([-0.5, -0.5, 0.1], [[1, 0, 0], [0, 1, 0]], quadrature=FINE)
        R = rot(0.7)
        img = affine_cell(R @ [-0.5, -0.5, 0.1], [R @ [1, 0, 0], R @ [0, 1, 0]], quadrature=FINE)
        lhs = pushforward_current(F, ChainCurrent(Chain([sq])), 0.7, 0.0)
        rhs = ChainCurrent(Chain([img]))
        for w in battery(3, 2, seed=2, count=2):
            assert abs(lhs.evaluate(w) - rhs.evaluate(w)) < 1e-7

    def test_boundary_commutes(self):
        F = Flow(shear(), (0, 1), dt=1e-2)
        T = ChainCurrent(Chain([affine_cell([-0.5, -0.5, 0], [[1, 0, 0], [0, 1, 0]], quadrature=FINE)]))
        for w in battery(3, 1, seed=4, count=2):
            a = BoundaryCurrent(pushforward_current(F, T, 0.6, 0.1)).evaluate(w)
            b = pushforward_current(F, BoundaryCurrent(T), 0.6, 0.1).evaluate(w)
            assert abs(a - b) < 1e-7


class TestDualLie:
    def test_dirac_directional_derivative(self):
        x, c = np.array([0.2, -0.1, 0.3]), np.array([0.5, 1.0, -0.4])
        T = dual_lie_derivative(DiracCurrent(x), VectorField.constant(c))
        for f in battery(3, 0, count=4):
            assert T.evaluate(f) == pytest.approx(f.coefficient_fields()[0].gradient(x)[0] @ c, abs=1e-13)

    def test_zero_field(self):
        T = DualLieCurrent(ChainCurrent(Chain([segment([0, 0, -1], [0, 0, 1])])), VectorField.constant([0, 0, 0]))
        assert T.evaluate(battery(3, 1, count=1)[0]) == 0.0

    @pytest.mark.parametrize("dim", [1, 2])
    def test_cartan_decomposition(self, dim):
        edges = [[1.0, 0.2, 0.0], [0.0, 1.0, 0.3]][:dim]
        T = ChainCurrent(Chain([affine_cell([-0.5, -0.4, 0.1], edges, quadrature=FINE)]))
        w = shear().at(0.0)
        L = DualLieCurrent(T, w)
        for om in battery(3, dim, seed=5, count=4):
            assert abs(L.evaluate(om) - L.decomposed().evaluate(om)) < 1e-8

    def test_rate_of_current(self):
        F = Flow(shear(multiplier=(1.0, 0.5)), (0, 1))
        T = ChainCurrent(Chain([affine_cell([-0.5, -0.5, 0], [[1, 0, 0], [0, 1, 0]], quadrature=FINE)]))
        for om in battery(3, 2, seed=6, count=2):
            r = current_rate_fd(F, T, om, 0.4)
            assert r.rel_err < 1e-3
