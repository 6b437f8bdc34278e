"""Mollification of chain currents into smooth-form currents.

For an r-chain c in R^n and a kernel ``K_ε`` the mollified current is
``T_ε(ω) = T_c(K_ε * ω)``.  It is the form current of the (n−r)-form

    φ_ε = Σ_μ s(μ̂, μ) J^μ_ε dx^{μ̂},      J^μ_ε(z) = ∫_c K_ε(z − x) dx^μ,

where ``μ̂`` is the complement of μ and ``s`` the sign with
``dx^{μ̂} ∧ dx^μ = s · dx^0 ∧ … ∧ dx^{n−1}``.  Each ``J^μ_ε(z)`` is a chain
integral computed by quadrature on the part of each cell within ε of z;
its derivatives are the same integrals against the kernel's exact
partial derivatives.

The family is read as an evolution ``t ↦ T_t`` with ``t = 1 − ε``: smooth
forms at t = 0 coalescing into the singular current as t → 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import complement, merge_sign, multi_indices, pullback_minors_batch
from .chains import Cell, Chain, Quadrature, affine_cell, boundary_chain, tensor_rule, torus
from .currents import Battery, ChainCurrent, FormCurrent
from .fields import AffineMap, Box, BumpPolynomial, CoefficientForm, DifferentialForm, Polynomial, ScalarField

__all__ = [
    "MarginError",
    "MollifierSpec",
    "radial_bump_mass",
    "cartesian_mass",
    "ChainConvolution",
    "Mollification",
    "fattened_domain",
    "mollify_chain_current",
    "BoundaryCommutation",
    "boundary_commutation",
    "boundary_commutation_residual",
    "weak_distance",
    "Snapshot",
    "coalescence_schedule",
]

_CHUNK = 400_000


class MarginError(ValueError):
    """The ε-neighborhood of a chain leaves the scenario box."""


def radial_bump_mass(n: int, q: int = 16, m: int = 8) -> float:
    """``∫_{R^n} exp(1 − 1/(1 − |y|^2))`` over the unit ball.

    The angular integral is the sphere area; the radial one uses
    Gauss–Legendre with ``q`` nodes on ``m`` panels.
    """
    x, w = np.polynomial.legendre.leggauss(q)
    edges = np.linspace(0.0, 1.0, m + 1)
    r = (edges[:-1, None] + 0.5 * np.diff(edges)[:, None] * (x + 1.0)).ravel()
    wr = (0.5 * np.diff(edges)[:, None] * w).ravel()
    qv = 1.0 - r**2
    bump = np.exp(1.0 - 1.0 / qv)
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    return float(area * np.sum(wr * r ** (n - 1) * bump))


def cartesian_mass(kernel: BumpPolynomial, quadrature: Quadrature = Quadrature(16, 8)) -> float:
    """Mass of a bump kernel by a tensor rule on its bounding cube."""
    lo = kernel.center - kernel.radius
    hi = kernel.center + kernel.radius
    nodes, weights = tensor_rule(lo, hi, quadrature)
    return float(weights @ kernel.value(nodes))


@dataclass(frozen=True)
class MollifierSpec:
    """Kernel, ε schedule and quadrature for mollifying chain currents.

    Parameters
    ----------
    n : int
        Ambient dimension.
    eps0 : float
        Largest kernel radius; the schedule is ``eps0 · 2^{-k}``, k = 0..K.
    K : int
        Last exponent of the schedule.
    inner : Quadrature
        Rule on the part of each chain cell inside the kernel support.
    outer : Quadrature
        Rule on the neighborhoods over which the smooth forms are integrated.
    box : Box, optional
        Scenario box; the ε-neighborhood of every mollified chain must stay
        strictly inside it.
    radial : Quadrature
        Radial rule normalizing the kernel.
    """

    n: int = 3
    eps0: float = 1.0
    K: int = 6
    inner: Quadrature = Quadrature(12, 2)
    outer: Quadrature = Quadrature(12, 2)
    box: Box | None = None
    radial: Quadrature = Quadrature(16, 8)
    _kernels: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("schedule needs K >= 0")
        if not self.eps0 > 0:
            raise ValueError("kernel radius must be positive")
        if self.box is not None and self.box.n != self.n:
            raise ValueError("scenario box has the wrong dimension")

    @property
    def schedule(self) -> np.ndarray:
        return self.eps0 * 2.0 ** -np.arange(self.K + 1)

    @cached_property
    def unit_mass(self) -> float:
        return radial_bump_mass(self.n, self.radial.q, self.radial.m)

    def mass_constant(self, eps: float) -> float:
        """``∫ exp(1 − 1/(1 − |y|^2/ε^2)) dy = ε^n · unit mass``."""
        return float(eps) ** self.n * self.unit_mass

    def kernel(self, eps: float) -> BumpPolynomial:
        """Unit-mass bump supported in the closed ball of radius ε about 0."""
        eps = float(eps)
        k = self._kernels.get(eps)
        if k is None:
            poly = Polynomial.constant(1.0 / self.mass_constant(eps), self.n)
            k = BumpPolynomial(np.zeros(self.n), eps, {0: poly})
            self._kernels[eps] = k
        return k

    def kernel_mass(self, eps: float, quadrature: Quadrature = Quadrature(16, 8)) -> float:
        """Mass of the normalized kernel by Cartesian quadrature."""
        return cartesian_mass(self.kernel(eps), quadrature)


# ---------------------------------------------------------------------------
# chain convolution
# ---------------------------------------------------------------------------

def _affine_ball_bounds(A: np.ndarray, b: np.ndarray, z: np.ndarray, eps: float):
    """Parameter boxes of ``{u ∈ [0,1]^r : |A u + b − z| < ε}`` for each point z."""
    N = z.shape[0]
    r = A.shape[1]
    rel = z - b
    if r == 0:
        active = np.sum(rel**2, axis=1) < eps**2
        return np.zeros((N, 0)), np.zeros((N, 0)), active
    Ginv = np.linalg.inv(A.T @ A)
    u0 = rel @ (Ginv @ A.T).T
    d2 = np.sum((u0 @ A.T - rel) ** 2, axis=1)
    half = np.sqrt(np.maximum(eps**2 - d2, 0.0))[:, None] * np.sqrt(np.diag(Ginv))[None, :]
    lo = np.clip(u0 - half, 0.0, 1.0)
    hi = np.clip(u0 + half, 0.0, 1.0)
    active = (d2 < eps**2) & np.all(hi > lo, axis=1)
    return lo, hi, active


def _ball_bounds(cell: Cell, z: np.ndarray, eps: float):
    if isinstance(cell.map, AffineMap):
        return _affine_ball_bounds(cell.map.A, cell.map.b, z, eps)
    N, r = z.shape[0], cell.r
    lo, hi = np.zeros((N, r)), np.ones((N, r))
    active = np.ones(N, dtype=bool)
    for i in range(N):
        got = cell.parameter_bounds((z[i], eps))
        if got is None:
            active[i] = False
            continue
        lo[i], hi[i] = got
        active[i] = bool(np.all(hi[i] > lo[i]))
    return lo, hi, active


class ChainConvolution(ScalarField):
    """``z ↦ w ∫_cell f(z − g(u)) M_μ(u) du`` for a kernel field f of radius ε.

    ``M_μ`` is the μ-minor of the cell Jacobian (1 for 0-cells) and ``w``
    the cell weight (multiplicity times orientation).
    """

    def __init__(self, cell: Cell, weight: float, kernel: ScalarField, eps: float, mu: tuple,
                 quadrature: Quadrature):
        super().__init__(cell.n)
        self.cell, self.weight, self.kernel, self.eps = cell, float(weight), kernel, float(eps)
        self.mu = tuple(mu)
        self.quadrature = quadrature
        self._mu_index = multi_indices(cell.n, cell.r).index(self.mu)

    def is_zero(self) -> bool:
        if self.weight == 0.0 or self.kernel.is_zero():
            return True
        if isinstance(self.cell.map, AffineMap) and self.cell.r > 0:
            A = self.cell.map.A
            return np.linalg.det(A[list(self.mu), :]) == 0.0
        return False

    def _value(self, z, memo):
        cell, r = self.cell, self.cell.r
        key = ("chain-conv", id(cell), self.eps)
        hit = memo.get(key)
        if hit is None:
            hit = _ball_bounds(cell, z, self.eps)
            memo[key] = hit
        lo, hi, active = hit
        out = np.zeros(z.shape[0])
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return out
        t, w = tensor_rule(np.zeros(r), np.ones(r), self.quadrature)
        Q = t.shape[0]
        step = max(1, _CHUNK // Q)
        for s in range(0, idx.size, step):
            sel = idx[s : s + step]
            span = hi[sel] - lo[sel]
            u = (lo[sel][:, None, :] + span[:, None, :] * t[None, :, :]).reshape(sel.size * Q, r)
            x = cell.map(u)
            wts = w[None, :] * np.prod(span, axis=1)[:, None]
            if r == 0:
                minor = np.ones((sel.size, Q))
            else:
                minor = pullback_minors_batch(cell.map.jacobian(u), r)[:, self._mu_index, 0].reshape(sel.size, Q)
            kv = self.kernel.value((z[sel][:, None, :] - x.reshape(sel.size, Q, -1)).reshape(-1, self.n))
            out[sel] = self.weight * np.sum(kv.reshape(sel.size, Q) * minor * wts, axis=1)
        return out

    def _partial(self, i):
        return ChainConvolution(self.cell, self.weight, self.kernel.partial(i), self.eps, self.mu, self.quadrature)


# ---------------------------------------------------------------------------
# neighborhoods
# ---------------------------------------------------------------------------

def _cell_ball(cell: Cell, eps: float):
    """A ball containing the ε-neighborhood of a cell."""
    if isinstance(cell.map, AffineMap):
        A, b = cell.map.A, cell.map.b
        corners = np.array(list(itertools.product((0.0, 1.0), repeat=cell.r)), dtype=float).reshape(2**cell.r, cell.r)
        pts = corners @ A.T + b
    else:
        nodes, _ = tensor_rule(np.zeros(cell.r), np.ones(cell.r), Quadrature(8, 8))
        pts = cell.map(nodes)
    c = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
    R = float(np.max(np.linalg.norm(pts - c, axis=1)))
    if not isinstance(cell.map, AffineMap):
        R *= 1.05
    return c, R + eps


def _axis_pieces(delta: float) -> list[tuple[float, float]]:
    if 1.0 - delta > delta:
        return [(-delta, delta), (delta, 1.0 - delta), (1.0 - delta, 1.0 + delta)]
    return [(-delta, 1.0 + delta)]


def fattened_domain(cell: Cell, eps: float, quadrature: Quadrature) -> Chain:
    """A positively oriented n-chain containing the ε-neighborhood of a cell.

    Affine r-cells get parallelotopes spanned by the cell edges and ε-slabs
    along an orthonormal complement; each cell axis is split into two end
    pieces of width 2ε and the interior, so that features of size ε at the
    cell boundary are resolved.  Circles in R^3 get a solid torus; other
    cells get a coordinate box.
    """
    n = cell.n
    if isinstance(cell.map, AffineMap):
        A, b = cell.map.A, cell.map.b
        r = A.shape[1]
        if r:
            Ginv = np.linalg.inv(A.T @ A)
            delta = eps * np.sqrt(np.diag(Ginv))
            Qfull, _ = np.linalg.qr(A, mode="complete")
            normals = Qfull[:, r:]
        else:
            delta = np.zeros(0)
            normals = np.eye(n)
        base = b - eps * normals.sum(axis=1)
        cells = []
        for ranges in itertools.product(*[_axis_pieces(d) for d in delta]):
            lo = np.array([a for a, _ in ranges])
            span = np.array([c - a for a, c in ranges])
            edges = np.concatenate([A * span[None, :], 2 * eps * normals], axis=1)
            orient = 1 if np.linalg.det(edges) > 0 else -1
            cells.append(affine_cell(base + A @ lo, edges.T, orient, quadrature, label="neighborhood"))
        return Chain(cells)
    geo = cell.geometry or {}
    if geo.get("kind") == "circle" and n == 3 and eps < geo["radius"]:
        return Chain([torus(geo["center"], geo["radius"], eps, geo["normal"], quadrature)])
    nodes, _ = tensor_rule(np.zeros(cell.r), np.ones(cell.r), Quadrature(8, 8))
    pts = cell.map(nodes)
    lo, hi = pts.min(axis=0) - 1.05 * eps, pts.max(axis=0) + 1.05 * eps
    return Chain([affine_cell(lo, np.diag(hi - lo), 1, quadrature, label="neighborhood")])


def _check_margin(chain: Chain, eps: float, box: Box | None) -> None:
    if box is None:
        return
    for cell, _ in chain:
        # include the cell's corners: Gauss nodes miss the endpoints
        grid = np.linspace(0.0, 1.0, 9)
        nodes = np.array(list(itertools.product(grid, repeat=cell.r)), dtype=float).reshape(-1 if cell.r else 1, cell.r)
        pts = cell.map(nodes)
        if np.any(pts.min(axis=0) - eps <= box.lo) or np.any(pts.max(axis=0) + eps >= box.hi):
            raise MarginError(f"the {eps}-neighborhood of {cell.label} leaves the scenario box {box}")


# ---------------------------------------------------------------------------
# mollification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mollification:
    """The smooth form φ_ε and its current ``T_{φ_ε}``."""

    eps: float
    form: DifferentialForm
    current: FormCurrent


def _cell_form(cell: Cell, weight: float, kernel: ScalarField, eps: float, quadrature: Quadrature) -> CoefficientForm:
    n, r = cell.n, cell.r
    p = n - r
    coeffs = {}
    for nu in multi_indices(n, p):
        mu = complement(nu, n)
        s = merge_sign(nu, mu)
        f = ChainConvolution(cell, s * weight, kernel, eps, mu, quadrature)
        if not f.is_zero():
            coeffs[nu] = f
    return CoefficientForm(n, p, coeffs, support=_cell_ball(cell, eps))


def mollify_chain_current(c, spec: MollifierSpec, eps: float, domains=None) -> Mollification:
    """Smooth (n−r)-form ``φ_ε`` with ``T_{φ_ε}(ω) = T_c(K_ε * ω)``.

    Each cell contributes its own form, integrated over its own
    neighborhood, so overlapping neighborhoods never double count.

    Parameters
    ----------
    c : Chain or Cell
    spec : MollifierSpec
    eps : float
        Kernel radius.
    domains : list of Chain, optional
        One n-chain per cell of ``c`` containing that cell's ε-neighborhood;
        :func:`fattened_domain` is used by default.

    Raises
    ------
    MarginError
        If the ε-neighborhood of ``c`` is not strictly inside ``spec.box``.
    """
    chain = c if isinstance(c, Chain) else Chain([c])
    if chain.n != spec.n:
        raise ValueError("chain and mollifier live in different dimensions")
    eps = float(eps)
    _check_margin(chain, eps, spec.box)
    kernel = spec.kernel(eps)
    pieces = []
    total = None
    for k, (cell, mult) in enumerate(chain):
        phi = _cell_form(cell, mult * cell.orientation, kernel, eps, spec.inner)
        dom = domains[k] if domains is not None else fattened_domain(cell, eps, spec.outer)
        pieces.append((phi, dom))
        total = phi if total is None else total + phi
    current = FormCurrent(pieces, spec.box, spec.outer, label=f"T_eps({eps:g})")
    return Mollification(eps, total, current)


@dataclass(frozen=True)
class BoundaryCommutation:
    """``∂T_{φ_ε}(ψ)`` and the mollified boundary ``T_{∂c,ε}(ψ)``.

    ``boundary`` is ``(−1)^{n−r+1} ∫ dφ_ε ∧ ψ`` with dφ_ε built from the
    kernel gradient; ``mollified_boundary`` mollifies the boundary chain
    ∂c directly.
    """

    boundary: float
    mollified_boundary: float

    @property
    def residual(self) -> float:
        return abs(self.boundary - self.mollified_boundary)


def boundary_commutation(c, spec: MollifierSpec, eps: float, psi: DifferentialForm) -> BoundaryCommutation:
    chain = c if isinstance(c, Chain) else Chain([c])
    moll = mollify_chain_current(chain, spec, eps)
    sign = (-1.0) ** (chain.n - chain.r + 1)
    dpieces = [(phi.d, dom) for phi, dom in moll.current.pieces]
    lhs = sign * FormCurrent(dpieces, spec.box, spec.outer).evaluate(psi)
    edge = boundary_chain(chain)
    rhs = mollify_chain_current(edge, spec, eps).current.evaluate(psi) if len(edge) else 0.0
    return BoundaryCommutation(float(lhs), float(rhs))


def boundary_commutation_residual(c, spec: MollifierSpec, eps: float, psi: DifferentialForm) -> float:
    """``|∂T_{φ_ε}(ψ) − T_{∂c,ε}(ψ)|``, the two sides built independently."""
    return boundary_commutation(c, spec, eps, psi).residual


def weak_distance(T, reference, battery: Battery) -> float:
    """``max_ω |T(ω) − reference(ω)|`` over a battery."""
    return max(abs(T.evaluate(w) - reference.evaluate(w)) for w in battery)


@dataclass(frozen=True)
class Snapshot:
    """One member ``T_t`` of the coalescence family, ``t = 1 − ε``."""

    t: float
    eps: float
    mollification: Mollification
    distance: float

    @property
    def current(self) -> FormCurrent:
        return self.mollification.current


def coalescence_schedule(c, spec: MollifierSpec, battery: Battery, K: int | None = None,
                         reference_quadrature: Quadrature = Quadrature(20, 8)) -> list[Snapshot]:
    """The family ``T_{1−ε_k}`` for ``ε_k = eps0 · 2^{-k}``, k = 0..K, in increasing t.

    Each snapshot records the weak distance to ``T_c`` on the battery.
    """
    chain = c if isinstance(c, Chain) else Chain([c])
    K = spec.K if K is None else int(K)
    T = ChainCurrent(chain, quadrature=reference_quadrature)
    refs = [T.evaluate(w) for w in battery]
    out = []
    for eps in spec.eps0 * 2.0 ** -np.arange(K + 1):
        moll = mollify_chain_current(chain, spec, eps)
        dist = max(abs(moll.current.evaluate(w) - v) for w, v in zip(battery, refs))
        out.append(Snapshot(1.0 - float(eps), float(eps), moll, float(dist)))
    return out
