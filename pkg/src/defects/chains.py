"""Parametrized cubical cells, chains, integration of forms and Stokes.

A cell of dimension r in R^n is a smooth map ``g: [0,1]^r → R^n`` with an
orientation sign.  Integrals are tensor Gauss–Legendre sums over ``m``
subdivisions per axis with ``q`` nodes each.

When the integrand is a form with a known compact support (a ball), cells
that can compute the parameter box containing the preimage of that ball
(affine cells, cylinders) integrate over that box only.  The form vanishes
identically outside, so this is exact, and it puts every node where the
integrand lives.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .algebra import pullback_minors_batch
from .fields import (
    AffineMap,
    Box,
    ComposedMap,
    DifferentialForm,
    MapBetweenCharts,
    NumericMap,
)

__all__ = [
    "Quadrature",
    "DEFAULT_QUADRATURE",
    "Cell",
    "Chain",
    "integrate",
    "boundary_chain",
    "stokes_residual",
    "image",
    "point",
    "segment",
    "affine_cell",
    "box",
    "halfplane",
    "circle",
    "cylinder_shell",
    "solid_cylinder",
    "annulus",
    "sphere",
    "spherical_cap",
    "ball",
    "torus",
]

_CHUNK = 250_000


@dataclass(frozen=True)
class Quadrature:
    """Gauss–Legendre order ``q`` per axis on ``m`` equal subdivisions per axis."""

    q: int = 10
    m: int = 4

    def __post_init__(self):
        if self.q < 1 or self.m < 1:
            raise ValueError("quadrature order and subdivisions must be positive")


DEFAULT_QUADRATURE = Quadrature()


@lru_cache(maxsize=64)
def _rule_1d(q: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(q)
    edges = np.linspace(0.0, 1.0, m + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes, weights


def tensor_rule(lo, hi, quad: Quadrature) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(N, r)`` and weights ``(N,)`` on the box ``[lo, hi]``."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    r = lo.size
    if r == 0:
        return np.zeros((1, 0)), np.ones(1)
    t, w = _rule_1d(quad.q, quad.m)
    axes = [lo[k] + (hi[k] - lo[k]) * t for k in range(r)]
    wts = [(hi[k] - lo[k]) * w for k in range(r)]
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, r)
    weights = wts[0]
    for k in range(1, r):
        weights = np.multiply.outer(weights, wts[k])
    return nodes, weights.reshape(-1)


BoundsFn = Callable[[np.ndarray, float], "tuple[np.ndarray, np.ndarray] | None"]


class Cell:
    """An oriented r-cell ``g: [0,1]^r → R^n``.

    Parameters
    ----------
    map : MapBetweenCharts
        Parametrization from R^r to R^n with exact Jacobian.
    orientation : int
        +1 or -1.
    quadrature : Quadrature
        Default rule for this cell.
    periodic_axes : tuple of int
        Parameter axes that close up on themselves (e.g. the angle of a
        circle); their two faces cancel and are omitted from the boundary.
    collapsed_faces : tuple of (axis, side)
        Faces that degenerate to lower-dimensional sets (e.g. the axis of a
        solid cylinder); they carry no r-1 dimensional measure and are
        omitted from the boundary.
    bounds : callable, optional
        ``bounds(center, radius)`` returns a parameter box ``(lo, hi)``
        containing the preimage of the closed ball, or ``None`` when the
        ball misses the cell.
    geometry : dict, optional
        Shape data for cells of a known family (e.g. a circle's center,
        radius and normal), used to build neighborhoods of the cell.
    """

    def __init__(self, map: MapBetweenCharts, orientation: int = 1, quadrature: Quadrature = DEFAULT_QUADRATURE,
                 periodic_axes: Iterable[int] = (), collapsed_faces: Iterable = (), bounds: BoundsFn | None = None,
                 label: str = "cell", geometry: dict | None = None):
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        self.map = map
        self.r = map.source_dim
        self.n = map.target_dim
        if self.r > self.n:
            raise ValueError("cell dimension exceeds ambient dimension")
        self.orientation = orientation
        self.quadrature = quadrature
        self.periodic_axes = tuple(sorted(set(periodic_axes)))
        self.collapsed_faces = tuple(tuple(f) for f in collapsed_faces)
        self._bounds = bounds
        self.label = label
        self.geometry = geometry
        self._immersion_ok = False

    def reversed(self) -> "Cell":
        c = self._copy()
        c.orientation = -self.orientation
        return c

    def with_quadrature(self, quadrature: Quadrature) -> "Cell":
        c = self._copy()
        c.quadrature = quadrature
        return c

    def _copy(self):
        c = Cell.__new__(Cell)
        c.__dict__.update(self.__dict__)
        return c

    def __call__(self, u) -> np.ndarray:
        return self.map(u)

    def parameter_bounds(self, support=None):
        full = (np.zeros(self.r), np.ones(self.r))
        if support is None or self._bounds is None:
            return full
        center, radius = support
        return self._bounds(np.asarray(center, dtype=float), float(radius))

    def check_immersion(self, tol: float = 1e-10, quadrature: Quadrature | None = None) -> None:
        """Raise if the Jacobian loses rank at a quadrature node."""
        if self.r == 0:
            return
        if isinstance(self.map, AffineMap):
            nodes = np.full((1, self.r), 0.5)
        else:
            nodes, _ = tensor_rule(np.zeros(self.r), np.ones(self.r), quadrature or self.quadrature)
        sv = np.linalg.svd(self.map.jacobian(nodes), compute_uv=False)
        smax = max(1.0, float(sv.max()))
        if np.any(sv[:, -1] < tol * smax):
            raise ValueError(f"{self.label}: parametrization is not an immersion at a quadrature node")

    def integrate(self, form: DifferentialForm, quadrature: Quadrature | None = None) -> float:
        if form.degree != self.r:
            raise ValueError(f"cannot integrate a {form.degree}-form over a {self.r}-cell")
        if form.n != self.n:
            raise ValueError("form and cell live in different dimensions")
        if not self._immersion_ok:
            self.check_immersion()
            self._immersion_ok = True
        b = self.parameter_bounds(form.support)
        if b is None:
            return 0.0
        lo, hi = b
        if np.any(hi <= lo):
            return 0.0
        nodes, weights = tensor_rule(lo, hi, quadrature or self.quadrature)
        total = 0.0
        for s in range(0, nodes.shape[0], _CHUNK):
            u = nodes[s : s + _CHUNK]
            x = self.map(u)
            vals = form.evaluate(x)
            if self.r == 0:
                integrand = vals[:, 0]
            else:
                minors = pullback_minors_batch(self.map.jacobian(u), self.r)[:, :, 0]
                integrand = np.einsum("na,na->n", vals, minors)
            total += float(weights[s : s + _CHUNK] @ integrand)
        return self.orientation * total

    def faces(self) -> list[tuple["Cell", int]]:
        """Oriented faces ``(face, sign)`` of the cubical boundary."""
        if self.r == 0:
            raise ValueError("a 0-cell has no boundary")
        out = []
        for i in range(self.r):
            if i in self.periodic_axes:
                continue
            for side in (0, 1):
                if (i, side) in self.collapsed_faces:
                    continue
                sign = (-1) ** (i + 1 + side)
                out.append((self._face(i, side), sign))
        return out

    def _face(self, i: int, side: int) -> "Cell":
        r = self.r
        A = np.zeros((r, r - 1))
        b = np.zeros(r)
        b[i] = float(side)
        cols = [k for k in range(r) if k != i]
        for j, k in enumerate(cols):
            A[k, j] = 1.0
        embed = AffineMap(A, b)
        periodic = [cols.index(k) for k in self.periodic_axes if k != i]
        collapsed = [(cols.index(k), s) for k, s in self.collapsed_faces if k != i]
        bounds = None
        if self._bounds is not None:
            parent = self._bounds

            def bounds(center, radius, parent=parent, cols=cols, i=i, side=side):
                got = parent(center, radius)
                if got is None:
                    return None
                lo, hi = got
                if not lo[i] <= side <= hi[i]:
                    return None
                return lo[cols], hi[cols]

        face_map = _compose(self.map, embed)
        return Cell(face_map, self.orientation, self.quadrature, periodic, collapsed, bounds,
                    label=f"{self.label}.face({i},{side})")

    def __repr__(self):
        return f"Cell({self.label}, r={self.r}, n={self.n}, orientation={self.orientation:+d})"


def _compose(outer: MapBetweenCharts, inner: AffineMap) -> MapBetweenCharts:
    if isinstance(outer, AffineMap):
        return AffineMap(outer.A @ inner.A, outer.A @ inner.b + outer.b)
    return ComposedMap(outer, inner)


class Chain:
    """A formal integer combination of cells of a common dimension."""

    def __init__(self, terms: Iterable = ()):
        terms = [(t, 1) if isinstance(t, Cell) else (t[0], int(t[1])) for t in terms]
        terms = [(c, k) for c, k in terms if k != 0]
        if terms:
            r, n = terms[0][0].r, terms[0][0].n
            if any(c.r != r or c.n != n for c, _ in terms):
                raise ValueError("all cells of a chain must share dimension and ambient space")
        self.terms = terms

    @property
    def r(self) -> int:
        return self.terms[0][0].r if self.terms else -1

    @property
    def n(self) -> int:
        return self.terms[0][0].n if self.terms else -1

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "Chain") -> "Chain":
        return Chain(self.terms + other.terms)

    def __neg__(self) -> "Chain":
        return Chain([(c, -k) for c, k in self.terms])

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, k: int) -> "Chain":
        return Chain([(c, k * m) for c, m in self.terms])

    __rmul__ = __mul__

    def with_quadrature(self, quadrature: Quadrature) -> "Chain":
        return Chain([(c.with_quadrature(quadrature), k) for c, k in self.terms])

    def integrate(self, form: DifferentialForm, quadrature: Quadrature | None = None) -> float:
        return integrate(form, self, quadrature)

    def boundary(self) -> "Chain":
        return boundary_chain(self)

    def __repr__(self):
        return f"Chain({len(self.terms)} cells, r={self.r})"


def _as_chain(c) -> Chain:
    return c if isinstance(c, Chain) else Chain([c])


def integrate(form: DifferentialForm, chain, quadrature: Quadrature | None = None) -> float:
    """``Σ_cells multiplicity · orientation · ∫ g* ω``."""
    total = 0.0
    for cell, k in _as_chain(chain):
        total += k * cell.integrate(form, quadrature)
    return total


def boundary_chain(chain) -> Chain:
    terms = []
    for cell, k in _as_chain(chain):
        terms.extend((f, k * s) for f, s in cell.faces())
    return Chain(terms)


def stokes_residual(form: DifferentialForm, chain, quadrature: Quadrature | None = None) -> float:
    """``|∫_{∂c} ω − ∫_c dω|``."""
    chain = _as_chain(chain)
    return abs(integrate(form, boundary_chain(chain), quadrature) - integrate(form.d, chain, quadrature))


def image(chain, f: MapBetweenCharts) -> Chain:
    """The image chain ``f(c)``: every cell map composed with ``f``."""
    out = []
    for cell, k in _as_chain(chain):
        c = Cell(ComposedMap(f, cell.map), cell.orientation, cell.quadrature, cell.periodic_axes,
                 cell.collapsed_faces, None, label=f"f({cell.label})")
        out.append((c, k))
    return Chain(out)


# ---------------------------------------------------------------------------
# cell families
# ---------------------------------------------------------------------------

def _affine_bounds(origin, E):
    G = E.T @ E
    Ginv = np.linalg.inv(G)
    pinv = Ginv @ E.T

    def bounds(center, radius):
        rel = center - origin
        u0 = pinv @ rel
        d2 = float(np.sum((E @ u0 - rel) ** 2))
        if d2 > radius**2:
            return None
        half = np.sqrt((radius**2 - d2) * np.diag(Ginv))
        lo = np.clip(u0 - half, 0.0, 1.0)
        hi = np.clip(u0 + half, 0.0, 1.0)
        return lo, hi

    return bounds


def affine_cell(origin, edges, orientation: int = 1, quadrature: Quadrature = DEFAULT_QUADRATURE,
                label: str = "affine") -> Cell:
    """The parallelotope ``origin + Σ u_k edges[k]``, ``u ∈ [0,1]^r``."""
    origin = np.asarray(origin, dtype=float).reshape(-1)
    E = np.asarray(edges, dtype=float).reshape(-1, origin.size).T  # n × r
    r = E.shape[1]
    if r and np.linalg.matrix_rank(E, tol=1e-10 * max(1.0, float(np.abs(E).max()))) < r:
        raise ValueError(f"{label}: edge vectors are linearly dependent")
    bounds = _affine_bounds(origin, E) if r > 0 else None
    return Cell(AffineMap(E if r else np.zeros((origin.size, 0)), origin), orientation, quadrature,
                bounds=bounds, label=label)


def point(p, orientation: int = 1) -> Cell:
    p = np.asarray(p, dtype=float).reshape(-1)
    return Cell(AffineMap(np.zeros((p.size, 0)), p), orientation, label=f"point{p.tolist()}")


def segment(a, b, orientation: int = 1, quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return affine_cell(a, [b - a], orientation, quadrature, label="segment")


def box(lo, hi, orientation: int = 1, quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    """The coordinate box ``[lo, hi] ⊂ R^n`` with the standard orientation."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return affine_cell(lo, np.diag(hi - lo), orientation, quadrature, label="box")


def halfplane(extent: float = 1.0, quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    """``{x^0 = 0, x^1 ≤ 0}`` in ``[-extent, extent]^3`` oriented by dx^1 ∧ dx^2.

    Its face at ``x^1 = 0`` is the line ``{(0, 0, x^2)}`` traversed in the
    +x^2 direction and enters the boundary with sign +1.
    """
    L = float(extent)
    return affine_cell([0.0, -L, -L], [[0.0, L, 0.0], [0.0, 0.0, 2 * L]], 1, quadrature, label="halfplane")


def _frame(axis):
    d = np.asarray(axis, dtype=float)
    d = d / np.linalg.norm(d)
    helper = np.eye(3)[np.argmin(np.abs(d))]
    e1 = np.cross(helper, d)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return e1, e2, d


def _cylindrical_numeric(center, e1, e2, d, rho, theta, zeta):
    """Build map ``u ↦ center + ρ(u)(cos θ(u) e1 + sin θ(u) e2) + ζ(u) d``.

    ``rho``, ``theta``, ``zeta`` are affine functions of u given as
    ``(const, gradient)`` pairs.
    """
    center = np.asarray(center, dtype=float)
    P = np.stack([e1, e2, d], axis=1)  # columns

    def parts(u):
        R = rho[0] + u @ rho[1]
        T = theta[0] + u @ theta[1]
        Z = zeta[0] + u @ zeta[1]
        return R, T, Z

    def func(u):
        R, T, Z = parts(u)
        local = np.stack([R * np.cos(T), R * np.sin(T), Z], axis=1)
        return center + local @ P.T

    def jac(u):
        R, T, Z = parts(u)
        c, s = np.cos(T), np.sin(T)
        # d(local)/du = outer(partial wrt (R,T,Z)) · gradients
        dl_dR = np.stack([c, s, np.zeros_like(c)], axis=1)
        dl_dT = np.stack([-R * s, R * c, np.zeros_like(c)], axis=1)
        dl_dZ = np.tile([0.0, 0.0, 1.0], (u.shape[0], 1))
        J = (dl_dR[:, :, None] * rho[1][None, None, :]
             + dl_dT[:, :, None] * theta[1][None, None, :]
             + dl_dZ[:, :, None] * zeta[1][None, None, :])
        return np.einsum("ij,njk->nik", P, J)

    return func, jac


def _circle_bounds(center, radius, e1, e2):
    def bounds(c, R):
        w = c - center
        a1, a2 = float(w @ e1), float(w @ e2)
        s = np.hypot(a1, a2)
        w2 = float(w @ w)
        full = (np.zeros(1), np.ones(1))
        if s == 0.0:
            return full if radius**2 + w2 <= R**2 else None
        kappa = (radius**2 + w2 - R**2) / (2 * radius * s)
        if kappa > 1.0:
            return None
        if kappa <= -1.0:
            return full
        half = np.arccos(kappa)
        a = np.arctan2(a2, a1) % (2 * np.pi)
        lo, hi = (a - half) / (2 * np.pi), (a + half) / (2 * np.pi)
        if lo < 0.0 or hi > 1.0:
            return full
        return np.array([lo]), np.array([hi])

    return bounds


def circle(center=(0.0, 0.0, 0.0), radius: float = 1.0, normal=(0.0, 0.0, 1.0),
           quadrature: Quadrature = DEFAULT_QUADRATURE, orientation: int = 1) -> Cell:
    """A circle traversed counterclockwise about ``normal`` (one periodic cell).

    In R^2 pass ``center`` of length 2; ``normal`` is then ignored.
    """
    center = np.asarray(center, dtype=float)
    radius = float(radius)
    n = center.size
    if n == 2:
        e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])

        def func(u):
            t = 2 * np.pi * u[:, 0]
            return center + radius * np.stack([np.cos(t), np.sin(t)], axis=1)

        def jac(u):
            t = 2 * np.pi * u[:, 0]
            return (2 * np.pi * radius * np.stack([-np.sin(t), np.cos(t)], axis=1))[:, :, None]
    else:
        e1, e2, d = _frame(normal)
        func, jac = _cylindrical_numeric(center, e1, e2, d, (radius, np.zeros(1)),
                                         (0.0, np.array([2 * np.pi])), (0.0, np.zeros(1)))
    geometry = {"kind": "circle", "center": center, "radius": radius,
                "normal": None if n == 2 else np.asarray(normal, dtype=float)}
    return Cell(NumericMap(1, n, func, jac, Box([0.0], [1.0])), orientation, quadrature,
                periodic_axes=(0,), bounds=_circle_bounds(center, radius, e1, e2), label="circle",
                geometry=geometry)


def _z_bounds(center_line, d, z0, z1, extra_radial=None):
    def bounds(center, radius):
        t = float((center - center_line) @ d)
        lo = (t - radius - z0) / (z1 - z0)
        hi = (t + radius - z0) / (z1 - z0)
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        if hi <= lo:
            return None
        return lo, hi
    return bounds


def cylinder_shell(radius: float, z0: float, z1: float, center=(0.0, 0.0, 0.0), axis=(0.0, 0.0, 1.0),
                   quadrature: Quadrature = DEFAULT_QUADRATURE, orientation: int = 1) -> Cell:
    """Cylinder ``ρ = radius``, ``z0 ≤ z ≤ z1`` about a line, parameters (θ, z).

    The parametrization orients the shell by its outward normal: with the
    outward radial direction first, (∂_ρ, ∂_θ, ∂_z) is positively oriented.
    """
    center = np.asarray(center, dtype=float)
    e1, e2, d = _frame(axis)
    func, jac = _cylindrical_numeric(center, e1, e2, d, (float(radius), np.zeros(2)),
                                     (0.0, np.array([2 * np.pi, 0.0])), (z0, np.array([0.0, z1 - z0])))
    zb = _z_bounds(center, d, z0, z1)

    def bounds(c, R):
        got = zb(c, R)
        if got is None:
            return None
        dist = np.linalg.norm((c - center) - ((c - center) @ d) * d)
        if dist - R > radius:
            return None
        return np.array([0.0, got[0]]), np.array([1.0, got[1]])

    return Cell(NumericMap(2, 3, func, jac, Box([0, 0], [1, 1])), orientation, quadrature,
                periodic_axes=(0,), bounds=bounds, label="cylinder-shell")


def solid_cylinder(r_inner: float, r_outer: float, z0: float, z1: float, center=(0.0, 0.0, 0.0),
                   axis=(0.0, 0.0, 1.0), quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    """``r_inner ≤ ρ ≤ r_outer``, ``z0 ≤ z ≤ z1`` in parameters (ρ, θ, z).

    With ``r_inner = 0`` this is the full solid cylinder; its collapsed axis
    face is left out of the boundary.  The standard orientation of R^3 is
    used: the Jacobian determinant is ``ρ · 2π (r_outer − r_inner)(z1 − z0)``.
    """
    center = np.asarray(center, dtype=float)
    e1, e2, d = _frame(axis)
    dr = r_outer - r_inner
    func, jac = _cylindrical_numeric(center, e1, e2, d, (r_inner, np.array([dr, 0.0, 0.0])),
                                     (0.0, np.array([0.0, 2 * np.pi, 0.0])), (z0, np.array([0.0, 0.0, z1 - z0])))
    zb = _z_bounds(center, d, z0, z1)

    def bounds(c, R):
        got = zb(c, R)
        if got is None:
            return None
        dist = np.linalg.norm((c - center) - ((c - center) @ d) * d)
        rlo = max((dist - R - r_inner) / dr, 0.0)
        rhi = min((dist + R - r_inner) / dr, 1.0)
        if rhi <= rlo:
            return None
        return np.array([rlo, 0.0, got[0]]), np.array([rhi, 1.0, got[1]])

    collapsed = [(0, 0)] if r_inner == 0 else []
    return Cell(NumericMap(3, 3, func, jac, Box([0, 0, 0], [1, 1, 1])), 1, quadrature,
                periodic_axes=(1,), collapsed_faces=collapsed, bounds=bounds, label="solid-cylinder")


def annulus(r_inner: float, r_outer: float, theta0: float = 0.0, theta1: float = 2 * np.pi,
            center=(0.0, 0.0, 0.0), normal=(0.0, 0.0, 1.0), quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    """Annular sector in the plane through ``center`` orthogonal to ``normal``.

    Parameters (ρ, θ); a full turn (``theta1 − theta0 = 2π``) makes θ
    periodic.  In R^2 pass a 2-vector center.
    """
    center = np.asarray(center, dtype=float)
    n = center.size
    full = np.isclose(theta1 - theta0, 2 * np.pi)
    dr, dt = r_outer - r_inner, theta1 - theta0
    if n == 2:
        def func(u):
            R = r_inner + dr * u[:, 0]
            T = theta0 + dt * u[:, 1]
            return center + np.stack([R * np.cos(T), R * np.sin(T)], axis=1)

        def jac(u):
            R = r_inner + dr * u[:, 0]
            T = theta0 + dt * u[:, 1]
            c, s = np.cos(T), np.sin(T)
            return np.stack([np.stack([dr * c, -dt * R * s], axis=1), np.stack([dr * s, dt * R * c], axis=1)], axis=1)
    else:
        e1, e2, d = _frame(normal)
        func, jac = _cylindrical_numeric(center, e1, e2, d, (r_inner, np.array([dr, 0.0])),
                                         (theta0, np.array([0.0, dt])), (0.0, np.zeros(2)))
    collapsed = [(0, 0)] if r_inner == 0 else []
    return Cell(NumericMap(2, n, func, jac, Box([0, 0], [1, 1])), 1, quadrature,
                periodic_axes=(1,) if full else (), collapsed_faces=collapsed, label="annulus")


def sphere(center=(0.0, 0.0, 0.0), radius: float = 1.0, quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    """Round sphere in R^3, parameters (polar, azimuth), outward oriented."""
    center = np.asarray(center, dtype=float)
    radius = float(radius)

    def func(u):
        p, a = np.pi * u[:, 0], 2 * np.pi * u[:, 1]
        return center + radius * np.stack([np.sin(p) * np.cos(a), np.sin(p) * np.sin(a), np.cos(p)], axis=1)

    def jac(u):
        p, a = np.pi * u[:, 0], 2 * np.pi * u[:, 1]
        dp = np.pi * radius * np.stack([np.cos(p) * np.cos(a), np.cos(p) * np.sin(a), -np.sin(p)], axis=1)
        da = 2 * np.pi * radius * np.stack([-np.sin(p) * np.sin(a), np.sin(p) * np.cos(a), np.zeros_like(p)], axis=1)
        return np.stack([dp, da], axis=2)

    return Cell(NumericMap(2, 3, func, jac, Box([0, 0], [1, 1])), 1, quadrature,
                periodic_axes=(1,), collapsed_faces=[(0, 0), (0, 1)], label="sphere")


def spherical_cap(center=(0.0, 0.0, 0.0), radius: float = 1.0, normal=(0.0, 0.0, 1.0),
                  polar_max: float = np.pi / 2, quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    """Cap of a sphere around ``normal`` up to polar angle ``polar_max``, outward oriented.

    The boundary is the rim circle, traversed counterclockwise about
    ``normal``.  ``polar_max = π/2`` gives a hemisphere.
    """
    center = np.asarray(center, dtype=float)
    radius = float(radius)
    e1, e2, d = _frame(normal)
    P = np.stack([e1, e2, d], axis=1)

    def func(u):
        p, a = polar_max * u[:, 0], 2 * np.pi * u[:, 1]
        local = np.stack([np.sin(p) * np.cos(a), np.sin(p) * np.sin(a), np.cos(p)], axis=1)
        return center + radius * local @ P.T

    def jac(u):
        p, a = polar_max * u[:, 0], 2 * np.pi * u[:, 1]
        dp = polar_max * radius * np.stack([np.cos(p) * np.cos(a), np.cos(p) * np.sin(a), -np.sin(p)], axis=1)
        da = 2 * np.pi * radius * np.stack([-np.sin(p) * np.sin(a), np.sin(p) * np.cos(a), np.zeros_like(p)], axis=1)
        return np.einsum("ij,njk->nik", P, np.stack([dp, da], axis=2))

    return Cell(NumericMap(2, 3, func, jac, Box([0, 0], [1, 1])), 1, quadrature,
                periodic_axes=(1,), collapsed_faces=[(0, 0)], label="spherical-cap")


def ball(center=(0.0, 0.0, 0.0), r_inner: float = 0.0, r_outer: float = 1.0,
         quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    """Spherical shell ``r_inner ≤ |x − center| ≤ r_outer`` in R^3 (standard orientation)."""
    center = np.asarray(center, dtype=float)
    dr = r_outer - r_inner

    def func(u):
        R = r_inner + dr * u[:, 0]
        p, a = np.pi * u[:, 1], 2 * np.pi * u[:, 2]
        return center + R[:, None] * np.stack([np.sin(p) * np.cos(a), np.sin(p) * np.sin(a), np.cos(p)], axis=1)

    def jac(u):
        R = r_inner + dr * u[:, 0]
        p, a = np.pi * u[:, 1], 2 * np.pi * u[:, 2]
        rad = np.stack([np.sin(p) * np.cos(a), np.sin(p) * np.sin(a), np.cos(p)], axis=1)
        dp = np.pi * R[:, None] * np.stack([np.cos(p) * np.cos(a), np.cos(p) * np.sin(a), -np.sin(p)], axis=1)
        da = 2 * np.pi * R[:, None] * np.stack([-np.sin(p) * np.sin(a), np.sin(p) * np.cos(a), np.zeros_like(p)], axis=1)
        return np.stack([dr * rad, dp, da], axis=2)

    collapsed = [(1, 0), (1, 1)] + ([(0, 0)] if r_inner == 0 else [])
    return Cell(NumericMap(3, 3, func, jac, Box([0, 0, 0], [1, 1, 1])), 1, quadrature,
                periodic_axes=(2,), collapsed_faces=collapsed, label="ball")


def torus(center, radius: float, tube: float, normal=(0.0, 0.0, 1.0), quadrature: Quadrature = DEFAULT_QUADRATURE) -> Cell:
    """Solid torus around a circle: parameters (s, ψ, θ) with tube radius ``s·tube``.

    Standard orientation of R^3; θ runs along the core circle.
    """
    center = np.asarray(center, dtype=float)
    e1, e2, d = _frame(normal)

    def pieces(u):
        s = tube * u[:, 0]
        psi = 2 * np.pi * u[:, 1]
        th = 2 * np.pi * u[:, 2]
        radial = np.cos(th)[:, None] * e1 + np.sin(th)[:, None] * e2
        tang = -np.sin(th)[:, None] * e1 + np.cos(th)[:, None] * e2
        return s, psi, th, radial, tang

    def func(u):
        s, psi, th, radial, tang = pieces(u)
        rr = radius + s * np.cos(psi)
        return center + rr[:, None] * radial + (s * np.sin(psi))[:, None] * d

    def jac(u):
        s, psi, th, radial, tang = pieces(u)
        rr = radius + s * np.cos(psi)
        ds = tube * (np.cos(psi)[:, None] * radial + np.sin(psi)[:, None] * d)
        dpsi = 2 * np.pi * s[:, None] * (-np.sin(psi)[:, None] * radial + np.cos(psi)[:, None] * d)
        dth = 2 * np.pi * rr[:, None] * tang
        J = np.stack([ds, dpsi, dth], axis=2)
        return J

    cell = Cell(NumericMap(3, 3, func, jac, Box([0, 0, 0], [1, 1, 1])), 1, quadrature,
                periodic_axes=(1, 2), collapsed_faces=[(0, 0)], label="torus")
    # fix orientation so the Jacobian determinant is positive
    probe = np.array([[0.5, 0.3, 0.2]])
    if np.linalg.det(cell.map.jacobian(probe)[0]) < 0:
        cell.orientation = -1
    return cell
