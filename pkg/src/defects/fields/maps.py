"""Smooth maps between chart domains with exact Jacobians."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .scalar import Polynomial, ScalarField, Sinusoid, as_points
from .domain import Box

__all__ = [
    "MapBetweenCharts",
    "FieldMap",
    "NumericMap",
    "AffineMap",
    "ComposedMap",
    "identity_map",
    "cylindrical_map",
    "jacobian_fd",
]


class MapBetweenCharts:
    """A smooth map ``f`` from a box in R^ns into R^nt.

    Subclasses implement ``_apply`` and ``_jacobian``; ``jacobian`` returns
    an array of shape ``(N, nt, ns)``.
    """

    def __init__(self, source_dim: int, target_dim: int, domain: Box | None = None, inverse=None):
        self.source_dim = int(source_dim)
        self.target_dim = int(target_dim)
        self.domain = domain if domain is not None else Box.whole(source_dim)
        self._inverse = inverse

    def __call__(self, x) -> np.ndarray:
        x = as_points(x, self.source_dim)
        self.domain.require(x)
        return self._apply(x)

    def jacobian(self, x) -> np.ndarray:
        x = as_points(x, self.source_dim)
        self.domain.require(x)
        return self._jacobian(x)

    @property
    def inverse(self) -> "MapBetweenCharts | None":
        return self._inverse

    def then(self, g: "MapBetweenCharts") -> "ComposedMap":
        """``g ∘ self``."""
        return ComposedMap(g, self)

    def _apply(self, x):
        raise NotImplementedError

    def _jacobian(self, x):
        raise NotImplementedError


class FieldMap(MapBetweenCharts):
    """A map whose components are scalar fields (exact derivatives to any order)."""

    def __init__(self, components: list[ScalarField], domain=None, inverse=None):
        ns = components[0].n
        super().__init__(ns, len(components), domain, inverse)
        self.components = list(components)

    def _apply(self, x):
        memo: dict = {}
        return np.stack([c._eval(x, memo) for c in self.components], axis=1)

    def _jacobian(self, x):
        memo: dict = {}
        out = np.empty((x.shape[0], self.target_dim, self.source_dim))
        for a, c in enumerate(self.components):
            for j in range(self.source_dim):
                out[:, a, j] = c.partial(j)._eval(x, memo)
        return out


class NumericMap(MapBetweenCharts):
    """A map given by vectorized callables for values and Jacobian."""

    def __init__(self, source_dim, target_dim, func: Callable, jac: Callable, domain=None, inverse=None):
        super().__init__(source_dim, target_dim, domain, inverse)
        self._func = func
        self._jac = jac

    def _apply(self, x):
        return np.asarray(self._func(x), dtype=float).reshape(x.shape[0], self.target_dim)

    def _jacobian(self, x):
        return np.asarray(self._jac(x), dtype=float).reshape(x.shape[0], self.target_dim, self.source_dim)


class AffineMap(FieldMap):
    """``x ↦ A x + b``; invertible square maps carry their inverse."""

    def __init__(self, A, b=None, domain=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        nt, ns = A.shape
        b = np.zeros(nt) if b is None else np.asarray(b, dtype=float)
        comps = []
        for a in range(nt):
            terms = {(0,) * ns: b[a]}
            for j in range(ns):
                ex = [0] * ns
                ex[j] = 1
                terms[tuple(ex)] = A[a, j]
            comps.append(Polynomial(terms, ns))
        super().__init__(comps, domain)
        self.A, self.b = A, b

    def _apply(self, x):
        return x @ self.A.T + self.b

    def _jacobian(self, x):
        return np.broadcast_to(self.A, (x.shape[0],) + self.A.shape).copy()

    @property
    def inverse(self):
        if self.A.shape[0] != self.A.shape[1] or abs(np.linalg.det(self.A)) < 1e-14:
            return None
        Ainv = np.linalg.inv(self.A)
        return AffineMap(Ainv, -Ainv @ self.b)


class ComposedMap(MapBetweenCharts):
    """``outer ∘ inner`` with the chain-rule Jacobian."""

    def __init__(self, outer: MapBetweenCharts, inner: MapBetweenCharts):
        if outer.source_dim != inner.target_dim:
            raise ValueError("maps cannot be composed: dimension mismatch")
        super().__init__(inner.source_dim, outer.target_dim, inner.domain)
        self.outer, self.inner = outer, inner

    def _apply(self, x):
        return self.outer(self.inner._apply(x))

    def _jacobian(self, x):
        y = self.inner._apply(x)
        return np.einsum("nij,njk->nik", self.outer.jacobian(y), self.inner._jacobian(x))

    @property
    def inverse(self):
        a, b = self.inner.inverse, self.outer.inverse
        if a is None or b is None:
            return None
        return ComposedMap(a, b)


def identity_map(n: int) -> AffineMap:
    return AffineMap(np.eye(n))


def cylindrical_map(r_min: float = 1e-8) -> FieldMap:
    """``(r, θ, z) ↦ (r cos θ, r sin θ, z)`` on ``r ≥ r_min``, with its inverse."""
    n = 3
    r = Polynomial.coordinate(0, n)
    comps = [
        r * Sinusoid(1, n, phase=np.pi / 2),
        r * Sinusoid(1, n),
        Polynomial.coordinate(2, n),
    ]
    domain = Box([r_min, -np.inf, -np.inf], [np.inf, np.inf, np.inf])

    def inv(x):
        rho = np.hypot(x[:, 0], x[:, 1])
        return np.stack([rho, np.arctan2(x[:, 1], x[:, 0]), x[:, 2]], axis=1)

    def inv_jac(x):
        rho2 = x[:, 0] ** 2 + x[:, 1] ** 2
        rho = np.sqrt(rho2)
        out = np.zeros((x.shape[0], 3, 3))
        out[:, 0, 0] = x[:, 0] / rho
        out[:, 0, 1] = x[:, 1] / rho
        out[:, 1, 0] = -x[:, 1] / rho2
        out[:, 1, 1] = x[:, 0] / rho2
        out[:, 2, 2] = 1.0
        return out

    inverse = NumericMap(3, 3, inv, inv_jac, domain=_OffAxis(r_min))
    return FieldMap(comps, domain=domain, inverse=inverse)


class _OffAxis(Box):
    """R^3 minus the open tube of radius r_min about the x3-axis."""

    def __init__(self, r_min):
        super().__init__([-np.inf] * 3, [np.inf] * 3)
        self.r_min = r_min

    def contains(self, x):
        return super().contains(x) & (np.hypot(x[:, 0], x[:, 1]) >= self.r_min)


def jacobian_fd(f: MapBetweenCharts, x, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference Jacobian, used for validation."""
    x = as_points(x, f.source_dim)
    out = np.empty((x.shape[0], f.target_dim, f.source_dim))
    for j in range(f.source_dim):
        step = np.zeros(f.source_dim)
        step[j] = h
        out[:, :, j] = (f(x + step) - f(x - step)) / (2 * h)
    return out
