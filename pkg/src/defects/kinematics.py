"""Flows of time-dependent velocity fields and the transport of forms and currents.

``Φ_{τ,t}`` maps the position of a particle at time t to its position at
time τ, so ``Φ_{t,t} = Id``, ``Φ_{τ,t} ∘ Φ_{t,s} = Φ_{τ,s}`` and
``Φ_{τ,t} = Φ_{t,τ}^{-1}``.  Flow maps are integrated with fixed-step RK4;
their tangent maps come from central differences in x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .currents import Current, DualLieCurrent, PushforwardCurrent
from .fields import (
    Box,
    DifferentialForm,
    MapBetweenCharts,
    Polynomial,
    VectorField,
    lie_derivative,
    pullback,
)
from .fields.scalar import as_points

__all__ = [
    "TimeDependentVectorField",
    "translation",
    "rotation_z",
    "linear",
    "shear",
    "Flow",
    "FlowMap",
    "inverse_velocity_check",
    "structure_form_rate",
    "structure_form_rate_fd",
    "lie_derivative_fd",
    "pushforward_current",
    "dual_lie_derivative",
    "current_rate_fd",
    "richardson_central",
]


class TimeDependentVectorField:
    """``w(t, x) = m(t) · w₀(x)`` with a polynomial multiplier ``m``.

    Parameters
    ----------
    base : VectorField
        The spatial profile ``w₀``.
    multiplier : sequence of float
        Coefficients ``c_k`` of ``m(t) = Σ c_k t^k``; ``(1.0,)`` is steady.
    """

    def __init__(self, base: VectorField, multiplier=(1.0,), name: str = "w"):
        self.base = base
        self.n = base.n
        self.multiplier = tuple(float(c) for c in multiplier)
        self.name = name

    def factor(self, t: float) -> float:
        return float(np.polynomial.polynomial.polyval(t, self.multiplier))

    def at(self, t: float) -> VectorField:
        """The frozen field ``w_t``."""
        return self.base.scaled(self.factor(t))

    def __call__(self, t: float, x) -> np.ndarray:
        return self.factor(t) * self.base.evaluate(x)


def _linear_field(A, b=None) -> VectorField:
    return VectorField.linear(np.asarray(A, dtype=float), b)


def translation(c, multiplier=(1.0,)) -> TimeDependentVectorField:
    return TimeDependentVectorField(VectorField.constant(c), multiplier, "translation")


def rotation_z(omega: float = 1.0, multiplier=(1.0,)) -> TimeDependentVectorField:
    """Rigid rotation about the x3-axis with angular speed ``omega``."""
    A = np.zeros((3, 3))
    A[0, 1], A[1, 0] = -omega, omega
    return TimeDependentVectorField(_linear_field(A), multiplier, "rotation-z")


def linear(A, multiplier=(1.0,)) -> TimeDependentVectorField:
    return TimeDependentVectorField(_linear_field(A), multiplier, "linear")


def shear(rate: float = 1.0, n: int = 3, multiplier=(1.0,)) -> TimeDependentVectorField:
    """Simple shear ``w = rate · x^1 ∂_0`` plus a gentle quadratic profile.

    The quadratic term ``0.1·rate·(x^0)^2 ∂_1`` makes the flow genuinely
    nonlinear, so tangent maps vary with position.
    """
    comps = [Polynomial.constant(0.0, n) for _ in range(n)]
    e1 = [0] * n
    e1[1] = 1
    e00 = [0] * n
    e00[0] = 2
    comps[0] = Polynomial({tuple(e1): rate}, n)
    comps[1] = Polynomial({tuple(e00): 0.1 * rate}, n)
    return TimeDependentVectorField(VectorField(comps), multiplier, "shear")


class Flow:
    """The flow of ``ẋ = w(s, x)`` on ``[a, b]``.

    Parameters
    ----------
    velocity : TimeDependentVectorField
    interval : (float, float)
        Time interval ``[a, b]``.
    dt : float, optional
        RK4 step; defaults to ``1e-3 · (b − a)``.  Each map uses
        ``ceil(|τ − t| / dt)`` equal steps.
    box : Box, optional
        Chart box; trajectories leaving it raise.
    """

    def __init__(self, velocity: TimeDependentVectorField, interval=(0.0, 1.0), dt: float | None = None,
                 box: Box | None = None):
        self.velocity = velocity
        self.n = velocity.n
        self.a, self.b = map(float, interval)
        if not self.b > self.a:
            raise ValueError("flow interval must have positive length")
        self.dt = 1e-3 * (self.b - self.a) if dt is None else float(dt)
        self.box = box if box is not None else Box.whole(self.n)

    def _check_times(self, *times):
        for s in times:
            if not self.a - 1e-12 <= s <= self.b + 1e-12:
                raise ValueError(f"time {s} outside the flow interval [{self.a}, {self.b}]")

    def _rhs(self, s, x):
        return self.velocity(s, x)

    def map(self, tau: float, t: float, x) -> np.ndarray:
        """``Φ_{τ,t}(x)``: integrate from time t to time τ."""
        self._check_times(tau, t)
        x = as_points(x, self.n).copy()
        self.box.require(x)
        if tau == t:
            return x
        steps = int(np.ceil(abs(tau - t) / self.dt - 1e-9))
        h = (tau - t) / steps
        s = t
        for k in range(steps):
            k1 = self._rhs(s, x)
            k2 = self._rhs(s + h / 2, x + h / 2 * k1)
            k3 = self._rhs(s + h / 2, x + h / 2 * k2)
            k4 = self._rhs(s + h, x + h * k3)
            x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            s = t + (k + 1) * h
            if not np.all(self.box.contains(x)):
                raise ValueError("trajectory leaves the chart box")
        return x

    __call__ = map

    def tangent(self, tau: float, t: float, x, h: float | None = None) -> np.ndarray:
        """``DΦ_{τ,t}(x)`` by central differences, shape ``(N, n, n)``."""
        x = as_points(x, self.n)
        if tau == t:
            return np.broadcast_to(np.eye(self.n), (x.shape[0], self.n, self.n)).copy()
        if h is None:
            h = 1e-5 * max(1.0, float(np.abs(x).max()))
        out = np.empty((x.shape[0], self.n, self.n))
        for j in range(self.n):
            step = np.zeros(self.n)
            step[j] = h
            out[:, :, j] = (self.map(tau, t, x + step) - self.map(tau, t, x - step)) / (2 * h)
        return out

    def as_map(self, tau: float, t: float) -> "FlowMap":
        return FlowMap(self, tau, t)


class FlowMap(MapBetweenCharts):
    """``Φ_{τ,t}`` as a chart map; its inverse is ``Φ_{t,τ}``."""

    def __init__(self, flow: Flow, tau: float, t: float):
        super().__init__(flow.n, flow.n, flow.box)
        self.flow, self.tau, self.t = flow, float(tau), float(t)

    def _apply(self, x):
        return self.flow.map(self.tau, self.t, x)

    def _jacobian(self, x):
        return self.flow.tangent(self.tau, self.t, x)

    @property
    def inverse(self):
        return FlowMap(self.flow, self.t, self.tau)

    @property
    def is_identity(self) -> bool:
        return self.tau == self.t


def inverse_velocity_check(flow: Flow, t: float, x, h: float = 1e-4) -> float:
    """``max |w⁻¹(t,x) + w(t,x)|`` where ``w⁻¹`` is the velocity of ``τ ↦ Φ_{τ,t}^{-1}``.

    ``Φ_{τ,t}^{-1} = Φ_{t,τ}``; its τ-derivative at τ = t is taken by a
    central difference (second-order one-sided at the ends of the interval).
    """
    x = as_points(x, flow.n)
    if t - h >= flow.a and t + h <= flow.b:
        w_inv = (flow.map(t, t + h, x) - flow.map(t, t - h, x)) / (2 * h)
    else:
        s = 1.0 if t - h < flow.a else -1.0
        f1, f2 = flow.map(t, t + s * h, x), flow.map(t, t + 2 * s * h, x)
        w_inv = s * (-3 * x + 4 * f1 - f2) / (2 * h)
    return float(np.max(np.linalg.norm(w_inv + flow.velocity(t, x), axis=1)))


def structure_form_rate(flow: Flow, phi: DifferentialForm, t: float) -> DifferentialForm:
    """``∂_τ Φ_{τ,t}^{-*} φ`` at τ = t, which is ``−L_{w_t} φ``."""
    return lie_derivative(flow.velocity.at(t), phi) * -1.0


def richardson_central(f, t: float, h: float) -> np.ndarray:
    """Central difference of ``f`` at ``t`` with one Richardson step over {h, h/2}."""
    d1 = (f(t + h) - f(t - h)) / (2 * h)
    d2 = (f(t + h / 2) - f(t - h / 2)) / h
    return (4 * d2 - d1) / 3


def _clamp_step(flow, t, h):
    return min(h, t - flow.a, flow.b - t) if flow.a < t < flow.b else h


def structure_form_rate_fd(flow: Flow, phi: DifferentialForm, t: float, x, h: float = 1e-4) -> np.ndarray:
    """Finite-difference rate of ``τ ↦ (Φ_{t,τ}^* φ)(x)`` at τ = t."""
    x = as_points(x, flow.n)
    h = _clamp_step(flow, t, h)
    return (pullback(flow.as_map(t, t + h), phi).evaluate(x)
            - pullback(flow.as_map(t, t - h), phi).evaluate(x)) / (2 * h)


def lie_derivative_fd(flow: Flow, omega: DifferentialForm, t: float, x, h: float = 1e-4) -> np.ndarray:
    """Finite-difference rate of ``τ ↦ (Φ_{τ,t}^* ω)(x)`` at τ = t (equals ``L_{w_t} ω``)."""
    x = as_points(x, flow.n)
    h = _clamp_step(flow, t, h)
    return (pullback(flow.as_map(t + h, t), omega).evaluate(x)
            - pullback(flow.as_map(t - h, t), omega).evaluate(x)) / (2 * h)


def pushforward_current(flow: Flow, T: Current, tau: float, t: float) -> PushforwardCurrent:
    """``Φ_{τ,t*} T``: ``ω ↦ T(Φ_{τ,t}^* ω)``."""
    return PushforwardCurrent(T, flow.as_map(tau, t))


def dual_lie_derivative(T: Current, w: VectorField) -> DualLieCurrent:
    return DualLieCurrent(T, w)


@dataclass(frozen=True)
class RateComparison:
    fd: float
    exact: float

    @property
    def abs_err(self) -> float:
        return abs(self.fd - self.exact)

    @property
    def rel_err(self) -> float:
        return self.abs_err / max(abs(self.exact), 1e-300)


def current_rate_fd(flow: Flow, T: Current, omega: DifferentialForm, t: float, h: float = 1e-3) -> RateComparison:
    """Compare ``∂_τ (Φ_{τ,t*} T)(ω)`` at τ = t with ``(L*_{w_t} T)(ω)``."""
    h = _clamp_step(flow, t, h)
    fd = float(richardson_central(lambda tau: pushforward_current(flow, T, tau, t).evaluate(omega), t, h))
    exact = DualLieCurrent(T, flow.velocity.at(t)).evaluate(omega)
    return RateComparison(fd, exact)
