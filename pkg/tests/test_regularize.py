import numpy as np
import pytest

from defects.chains import Chain, Quadrature, circle, segment
from defects.currents import ChainCurrent
from defects.currents import test_form_battery as battery
from defects.fields import Box, Polynomial
from defects.fields import test_form as bump_form
from defects.regularize import (
    MarginError,
    MollifierSpec,
    boundary_commutation,
    boundary_commutation_residual,
    cartesian_mass,
    coalescence_schedule,
    mollify_chain_current,
    radial_bump_mass,
)

from oracles import tanh_sinh

FINE = Quadrature(20, 8)
SPEC = MollifierSpec(3, eps0=1.0, K=6, box=Box([-3.5] * 3, [3.5] * 3))
AXIS = Chain([segment([0, 0, -2], [0, 0, 2], quadrature=FINE)])
SHORT = Chain([segment([0, 0, -0.5], [0, 0, 0.5], quadrature=FINE)])


def radial_moments(n):
    r, w = tanh_sinh(0.0, 1.0)
    with np.errstate(divide="ignore"):
        B = np.exp(1 - 1 / (1 - r**2))
    return w @ (r ** (n - 1) * B), w @ (r ** (n + 1) * B)


class TestKernel:
    def test_unit_ball_mass_1d(self):
        x, w = tanh_sinh(-1.0, 1.0)
        with np.errstate(divide="ignore"):
            oracle = w @ np.exp(1 - 1 / (1 - x**2))
        assert radial_bump_mass(1) == pytest.approx(oracle, rel=1e-10)

    @pytest.mark.parametrize("n", [2, 3])
    def test_radial_vs_oracle(self, n):
        import math
        m0, _ = radial_moments(n)
        area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
        assert radial_bump_mass(n) == pytest.approx(area * m0, rel=1e-9)

    @pytest.mark.parametrize("eps", [1.0, 0.25, 2.0**-6])
    def test_unit_mass(self, eps):
        assert abs(SPEC.kernel_mass(eps) - 1.0) < 1e-8

    def test_cartesian_route(self):
        k = MollifierSpec(2).kernel(0.5)
        assert cartesian_mass(k) == pytest.approx(1.0, abs=1e-8)

    def test_support(self):
        k = SPEC.kernel(0.3)
        x = np.array([[0.31, 0, 0], [0, 0.2, 0.25], [0.1, 0.1, 0.1]])
        v = k.value(x)
        assert v[0] == 0.0 and v[1] == 0.0 and v[2] > 0

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            MollifierSpec(3, K=-1)
        with pytest.raises(ValueError):
            MollifierSpec(3, eps0=0.0)

    def test_schedule(self):
        assert np.allclose(SPEC.schedule, 2.0 ** -np.arange(7))


class TestMollify:
    def test_degree_and_dimension(self):
        m = mollify_chain_current(AXIS, SPEC, 0.25)
        assert m.form.degree == 2 and m.current.dim == 1

    def test_moment_oracle(self):
        # T_ε(ω) − T(ω) ≈ ε² M₂/(2n) ∫_L Δω_z
        w = bump_form([0.1, -0.05, 0.2], 1.2, {(2,): Polynomial({(0, 0, 0): 1.0, (1, 0, 0): 0.3}, 3)}, 1)
        f = w.coefficient_fields()[2]
        c, R = w.support
        half = np.sqrt(R**2 - c[0] ** 2 - c[1] ** 2)
        z, wz = tanh_sinh(c[2] - half, c[2] + half)
        P, h = np.stack([0 * z, 0 * z, z], axis=1), 1e-3
        lap = sum((f.value(P + h * e) - 2 * f.value(P) + f.value(P - h * e)) / h**2 for e in np.eye(3))
        m0, m2 = radial_moments(3)
        eps = 0.25
        predicted = eps**2 * (m2 / m0) / 6 * (wz @ lap)
        diff = mollify_chain_current(AXIS, SPEC, eps).current.evaluate(w) - ChainCurrent(AXIS).evaluate(w)
        assert diff == pytest.approx(predicted, rel=1e-2)

    def test_zero_away_from_chain(self):
        m = mollify_chain_current(AXIS, SPEC, 0.25)
        x = np.array([[0.26, 0, 0], [0, 0.3, 1.0], [0, 0, 2.3]])
        assert np.all(m.form.evaluate(x) == 0.0)
        w = bump_form([1.0, 0, 0], 0.5, {(2,): 1.0}, 1)
        assert m.current.evaluate(w) == 0.0

    def test_margin(self):
        spec = MollifierSpec(3, box=Box([-2.2] * 3, [2.2] * 3))
        with pytest.raises(MarginError):
            mollify_chain_current(AXIS, spec, 0.25)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mollify_chain_current(AXIS, MollifierSpec(2), 0.25)


class TestBoundaryCommutation:
    def test_segment(self):
        spec = MollifierSpec(3, inner=Quadrature(20, 4), outer=Quadrature(20, 2))
        for psi in battery(3, 0, count=4):
            assert boundary_commutation_residual(SHORT, spec, 0.25, psi) < 1e-6

    def test_closed_circle(self):
        # periodic cell: empty boundary
        c = Chain([circle([0, 0, 0], 1.0)])
        psi = battery(3, 0, count=1)[0]
        r = boundary_commutation(c, MollifierSpec(3), 0.25, psi)
        assert r.mollified_boundary == 0.0 and abs(r.boundary) < 1e-6

    def test_residual_decreases(self):
        psi = battery(3, 0, count=1)[0]
        spec = MollifierSpec(3, outer=Quadrature(20, 2))
        r = [boundary_commutation_residual(SHORT, spec, e, psi) for e in (0.5, 0.25)]
        assert r[1] < r[0]


class TestCoalescence:
    def test_single_snapshot(self):
        snaps = coalescence_schedule(AXIS, SPEC, battery(3, 1, count=2), K=0)
        assert len(snaps) == 1 and snaps[0].t == 0.0

    def test_monotone_and_final(self):
        snaps = coalescence_schedule(AXIS, SPEC, battery(3, 1, count=4), K=6)
        d = [s.distance for s in snaps]
        assert all(b < a for a, b in zip(d, d[1:]))
        assert d[-1] < 1e-3
        assert [s.t for s in snaps] == sorted(s.t for s in snaps)
