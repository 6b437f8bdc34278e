"""De Rham currents as linear functionals on compactly supported test forms.

An r-current on R^n acts on r-forms.  Every operator is implemented through
its defining identity on test forms:

=====================  ===========================
current                value on a test form ω
=====================  ===========================
``T_φ``                ``∫ φ ∧ ω``
``T_S``                ``∫_S u ω`` (weight u = 1 by default)
``δ_x``                ``ω(x)``
``∂T``                 ``T(dω)``
``T ∧ v``              ``T(v ⌟ ω)``
``T ⌞ α``              ``T(α ∧ ω)``
``f_* T``              ``T(f* ω)``
``L*_w T``             ``T(L_w ω)``
=====================  ===========================

Singular forms (a closed form with a line or point singularity) have their
boundary current evaluated by tube excision: the integral over the excised
domain is turned into an integral over the tube boundary, computed for a
sequence of radii and extrapolated to zero radius.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .chains import (
    Chain,
    Quadrature,
    annulus,
    ball,
    boundary_chain,
    circle,
    cylinder_shell,
    integrate,
    solid_cylinder,
    sphere,
)
from .fields import (
    Box,
    CoefficientForm,
    DifferentialForm,
    MapBetweenCharts,
    MultivectorField,
    ScalarField,
    VectorField,
    WedgeForm,
    contract_field,
    lie_derivative,
    pullback,
    random_test_form,
)

__all__ = [
    "Current",
    "FormCurrent",
    "ChainCurrent",
    "DiracCurrent",
    "BoundaryCurrent",
    "WedgeMultivectorCurrent",
    "ContractFormCurrent",
    "PushforwardCurrent",
    "DualLieCurrent",
    "LinearCombinationCurrent",
    "ExcisionBoundaryCurrent",
    "ExcisionSpec",
    "ExcisionResult",
    "current_from_form",
    "current_from_chain",
    "dirac",
    "boundary",
    "wedge_multivector",
    "contract_form",
    "pushforward",
    "dual_lie_derivative",
    "singular_boundary_eval",
    "excised_volume_eval",
    "richardson",
    "Battery",
    "test_form_battery",
    "frank_rule_residual",
    "FrankReport",
    "frank_dislocation_example",
    "DecomposabilityProbe",
    "decomposability_probe",
]


class Current:
    """Base class for r-currents on R^n.

    Subclasses implement ``_evaluate``; :meth:`evaluate` checks the degree
    of the test form first.
    """

    def __init__(self, n: int, dim: int, label: str):
        if not 0 <= dim <= n:
            raise ValueError(f"a {dim}-current cannot live on R^{n}")
        self.n = int(n)
        self.dim = int(dim)
        self.label = label

    def evaluate(self, form: DifferentialForm) -> float:
        if not isinstance(form, DifferentialForm):
            raise TypeError("currents act on differential forms")
        if form.n != self.n:
            raise ValueError(f"{self.label}: test form on R^{form.n}, current on R^{self.n}")
        if form.degree != self.dim:
            raise ValueError(f"{self.label}: a {self.dim}-current cannot act on a {form.degree}-form")
        return float(self._evaluate(form))

    __call__ = evaluate

    def _evaluate(self, form):
        raise NotImplementedError

    # operators ---------------------------------------------------------
    def boundary(self) -> "BoundaryCurrent":
        return BoundaryCurrent(self)

    def wedge(self, v: MultivectorField) -> "WedgeMultivectorCurrent":
        return WedgeMultivectorCurrent(self, v)

    def contract(self, alpha: DifferentialForm) -> "ContractFormCurrent":
        return ContractFormCurrent(self, alpha)

    def pushforward(self, f: MapBetweenCharts) -> "PushforwardCurrent":
        return PushforwardCurrent(self, f)

    def __add__(self, other: "Current") -> "LinearCombinationCurrent":
        return LinearCombinationCurrent([(1.0, self), (1.0, other)])

    def __sub__(self, other: "Current") -> "LinearCombinationCurrent":
        return LinearCombinationCurrent([(1.0, self), (-1.0, other)])

    def __neg__(self):
        return LinearCombinationCurrent([(-1.0, self)])

    def __mul__(self, s: float):
        return LinearCombinationCurrent([(float(s), self)])

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}({self.label}, n={self.n}, dim={self.dim})"


def _ball_inside(support, region: Box) -> bool:
    c, R = support
    c = np.asarray(c, dtype=float)
    return bool(np.all(c - R >= region.lo - 1e-12) and np.all(c + R <= region.hi + 1e-12))


class FormCurrent(Current):
    """``T_φ(ω) = ∫ φ ∧ ω`` over an n-chain covering the test-form supports.

    Parameters
    ----------
    pieces : list of (DifferentialForm, Chain)
        A piecewise form: each form integrated over its own n-chain.  A
        single ``(φ, chain)`` gives the usual smooth case.
    region : Box, optional
        The region the chains cover.  Test forms whose support ball leaves
        it are rejected.
    quadrature : Quadrature, optional
        Overrides the cell rules.
    """

    def __init__(self, pieces, region: Box | None = None, quadrature: Quadrature | None = None,
                 label: str = "T_phi"):
        pieces = [(f, c if isinstance(c, Chain) else Chain([c])) for f, c in pieces]
        phi0 = pieces[0][0]
        n = phi0.n
        if any(f.n != n or f.degree != phi0.degree for f, _ in pieces):
            raise ValueError("all pieces must be forms of one degree on one space")
        for _, c in pieces:
            if c.r != n:
                raise ValueError("form currents integrate over n-dimensional chains")
        super().__init__(n, n - phi0.degree, label)
        self.pieces = pieces
        self.region = region
        self.quadrature = quadrature

    @property
    def form(self) -> DifferentialForm:
        return self.pieces[0][0]

    def _evaluate(self, form):
        if self.region is not None:
            if form.support is None or not _ball_inside(form.support, self.region):
                raise ValueError(f"{self.label}: test-form support escapes the domain {self.region}")
        total = 0.0
        for phi, c in self.pieces:
            wf = WedgeForm(phi, form)
            # the chains already bound φ; clip the quadrature to the test form
            if form.support is not None:
                wf.support = form.support
            total += integrate(wf, c, self.quadrature)
        return total


class ChainCurrent(Current):
    """``T_S(ω) = ∫_S u ω`` for a chain S and an optional weight field u."""

    def __init__(self, chain, weight: ScalarField | None = None, quadrature: Quadrature | None = None,
                 label: str = "T_S"):
        chain = chain if isinstance(chain, Chain) else Chain([chain])
        super().__init__(chain.n, chain.r, label)
        self.chain = chain
        self.weight = weight
        self.quadrature = quadrature

    def _evaluate(self, form):
        if self.weight is not None:
            form = form * self.weight
        return integrate(form, self.chain, self.quadrature)


class DiracCurrent(Current):
    """``δ_x(f) = f(x)``."""

    def __init__(self, x, label: str = "delta"):
        self.x = np.asarray(x, dtype=float).reshape(-1)
        super().__init__(self.x.size, 0, label)

    def _evaluate(self, form):
        return form.evaluate(self.x[None, :])[0, 0]


class BoundaryCurrent(Current):
    """``∂T(ω) = T(dω)``."""

    def __init__(self, T: Current):
        if T.dim == 0:
            raise ValueError("0-currents have no boundary")
        super().__init__(T.n, T.dim - 1, f"∂({T.label})")
        self.T = T

    def _evaluate(self, form):
        return self.T.evaluate(form.d)


class WedgeMultivectorCurrent(Current):
    """``(T ∧ v)(ω) = T(v ⌟ ω)`` for an m-vector field v."""

    def __init__(self, T: Current, v: MultivectorField):
        if T.dim + v.degree > T.n:
            raise ValueError("degree overflow in T ∧ v")
        super().__init__(T.n, T.dim + v.degree, f"({T.label})∧v")
        self.T, self.v = T, v

    def _evaluate(self, form):
        return self.T.evaluate(contract_field(self.v, form))


class ContractFormCurrent(Current):
    """``(T ⌞ α)(ω) = T(α ∧ ω)`` for an m-form α."""

    def __init__(self, T: Current, alpha: DifferentialForm):
        if alpha.degree > T.dim:
            raise ValueError("degree underflow in T ⌞ α")
        super().__init__(T.n, T.dim - alpha.degree, f"({T.label})⌞α")
        self.T, self.alpha = T, alpha

    def _evaluate(self, form):
        if self.alpha.degree == 0:
            return self.T.evaluate(form * self.alpha.coefficient_fields()[0])
        return self.T.evaluate(WedgeForm(self.alpha, form))


def _pulled_support(f: MapBetweenCharts, support, samples: int = 400, safety: float = 1.1):
    """Ball containing ``f^{-1}(B)``, estimated from sampled boundary points of B."""
    if support is None or f.inverse is None:
        return None
    c, R = support
    c = np.asarray(c, dtype=float)
    rng = np.random.default_rng(0)
    d = rng.normal(size=(samples, c.size))
    d /= np.linalg.norm(d, axis=1)[:, None]
    pts = np.vstack([c[None, :], c + R * d, c + 0.5 * R * d])
    pre = f.inverse(pts)
    center = pre[0]
    return center, safety * float(np.max(np.linalg.norm(pre - center, axis=1)))


class PushforwardCurrent(Current):
    """``(f_* T)(ω) = T(f* ω)``."""

    def __init__(self, T: Current, f: MapBetweenCharts):
        if f.source_dim != T.n:
            raise ValueError("map source does not match the current's space")
        super().__init__(f.target_dim, T.dim, f"f_*({T.label})")
        self.T, self.map = T, f

    def _evaluate(self, form):
        if getattr(self.map, "is_identity", False):
            return self.T.evaluate(form)
        pb = pullback(self.map, form)
        pb.support = _pulled_support(self.map, form.support)
        return self.T.evaluate(pb)


class DualLieCurrent(Current):
    """``(L*_w T)(ω) = T(L_w ω)``."""

    def __init__(self, T: Current, w: VectorField):
        super().__init__(T.n, T.dim, f"L*_w({T.label})")
        self.T, self.w = T, w

    def _evaluate(self, form):
        return self.T.evaluate(lie_derivative(self.w, form))

    def decomposed(self) -> Current:
        """``(∂T) ∧ w + ∂(T ∧ w)``; the first term is absent for 0-currents."""
        second = BoundaryCurrent(WedgeMultivectorCurrent(self.T, self.w))
        if self.T.dim == 0:
            return LinearCombinationCurrent([(1.0, second)])
        return WedgeMultivectorCurrent(BoundaryCurrent(self.T), self.w) + second


class LinearCombinationCurrent(Current):
    def __init__(self, terms):
        T0 = terms[0][1]
        if any(T.n != T0.n or T.dim != T0.dim for _, T in terms):
            raise ValueError("cannot combine currents of different dimensions")
        super().__init__(T0.n, T0.dim, " + ".join(T.label for _, T in terms))
        self.terms = [(float(c), T) for c, T in terms]

    def _evaluate(self, form):
        return sum(c * T.evaluate(form) for c, T in self.terms if c)


def current_from_form(phi: DifferentialForm, domain, region: Box | None = None,
                      quadrature: Quadrature | None = None) -> FormCurrent:
    return FormCurrent([(phi, domain)], region, quadrature)


def current_from_chain(chain, weight: ScalarField | None = None, quadrature: Quadrature | None = None) -> ChainCurrent:
    return ChainCurrent(chain, weight, quadrature)


def dirac(x) -> DiracCurrent:
    return DiracCurrent(x)


def boundary(T: Current) -> BoundaryCurrent:
    return BoundaryCurrent(T)


def wedge_multivector(T: Current, v: MultivectorField) -> WedgeMultivectorCurrent:
    return WedgeMultivectorCurrent(T, v)


def contract_form(T: Current, alpha: DifferentialForm) -> ContractFormCurrent:
    return ContractFormCurrent(T, alpha)


def pushforward(T: Current, f: MapBetweenCharts) -> PushforwardCurrent:
    return PushforwardCurrent(T, f)


def dual_lie_derivative(T: Current, w: VectorField) -> DualLieCurrent:
    return DualLieCurrent(T, w)


# ---------------------------------------------------------------------------
# excision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExcisionSpec:
    """Tubes around a singular axis line or point, radii ``eps0 · 2^{-k}``.

    Parameters
    ----------
    kind : {"axis", "point"}
        Singular set: the line through ``origin`` along ``direction`` (R^3
        only), or the point ``origin`` (R^2 or R^3).
    eps0 : float
        Largest tube radius.
    K : int
        Last exponent; radii ``eps0 · 2^{-k}`` for ``k = 0..K`` (K ≥ 3).
    quadrature : Quadrature
        Rule on the tube boundary cells.
    order : int
        Error model ``v(ε) = v0 + c·ε^order`` for the extrapolation.  For
        smooth test forms the tube correction is quadratic in ε: the part
        of the integrand linear in ε averages to zero around the tube.
    """

    kind: str = "axis"
    origin: tuple = (0.0, 0.0, 0.0)
    direction: tuple = (0.0, 0.0, 1.0)
    eps0: float = 0.2
    K: int = 4
    quadrature: Quadrature = Quadrature(16, 4)
    order: int = 2

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("extrapolation order must be 1 or 2")
        if self.kind not in ("axis", "point"):
            raise ValueError("excision kind must be 'axis' or 'point'")
        if self.K < 3:
            raise ValueError("need at least four tube radii (K >= 3)")
        if not self.eps0 > 0:
            raise ValueError("tube radius must be positive")

    @property
    def radii(self) -> np.ndarray:
        return self.eps0 * 2.0 ** -np.arange(self.K + 1)

    @property
    def n(self) -> int:
        return len(self.origin)

    def axis_extent(self, support) -> tuple[float, float]:
        """Axial parameter range covering a support ball (padded)."""
        if support is None:
            raise ValueError("excision needs test forms with a known compact support")
        c, R = support
        d = np.asarray(self.direction, dtype=float)
        d = d / np.linalg.norm(d)
        t = float((np.asarray(c) - np.asarray(self.origin)) @ d)
        return t - 1.01 * R, t + 1.01 * R

    def shell(self, eps: float, support) -> Chain:
        """Tube boundary at radius ``eps`` oriented away from the singular set."""
        q = self.quadrature
        if self.kind == "axis":
            if self.n != 3:
                raise ValueError("axis excision is implemented in R^3")
            z0, z1 = self.axis_extent(support)
            return Chain([cylinder_shell(eps, z0, z1, self.origin, self.direction, q)])
        if self.n == 2:
            return Chain([circle(self.origin, eps, quadrature=q)])
        if self.n == 3:
            return Chain([sphere(self.origin, eps, q)])
        raise ValueError("point excision is implemented in R^2 and R^3")

    def excised_region(self, eps: float, support, quadrature: Quadrature | None = None) -> Chain:
        """n-chain covering ``supp ∖ tube_eps`` (``eps = 0`` gives no hole)."""
        q = quadrature or self.quadrature
        c, R = support
        c = np.asarray(c, dtype=float)
        o = np.asarray(self.origin, dtype=float)
        if self.kind == "axis":
            d = np.asarray(self.direction, dtype=float)
            d = d / np.linalg.norm(d)
            rel = c - o
            dist = np.linalg.norm(rel - (rel @ d) * d)
            z0, z1 = self.axis_extent(support)
            return Chain([solid_cylinder(eps, dist + 1.01 * R, z0, z1, o, d, q)])
        outer = np.linalg.norm(c - o) + 1.01 * R
        if self.n == 2:
            return Chain([annulus(eps, outer, center=o, quadrature=q)])
        return Chain([ball(o, eps, outer, q)])


@dataclass(frozen=True)
class ExcisionResult:
    value: float
    residual: float
    slope: float
    radii: tuple
    values: tuple

    def as_dict(self):
        return {"value": self.value, "extrapolation_residual": self.residual, "slope": self.slope,
                "radii": list(self.radii), "values": list(self.values)}


def richardson(radii, values, order: int = 2, last: int = 3) -> tuple[float, float, float]:
    """Least-squares fit ``v = v0 + c·ε^order`` on the last ``last`` samples.

    Returns ``(v0, max |fit residual|, c)``.  A small residual confirms the
    assumed error model.
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) >= 0):
        raise ValueError("tube radii must be strictly decreasing")
    eps = radii[-last:]
    v = np.asarray(values, dtype=float)[-last:]
    A = np.stack([np.ones_like(eps), eps**order], axis=1)
    (v0, c), *_ = np.linalg.lstsq(A, v, rcond=None)
    return float(v0), float(np.max(np.abs(A @ [v0, c] - v))), float(c)


def _check_closed(phi: DifferentialForm, pts: np.ndarray, tol: float = 1e-8) -> None:
    if phi.degree == phi.n:
        return
    dv = phi.d.evaluate(pts)
    scale = max(1.0, float(np.abs(phi.evaluate(pts)).max()))
    if np.abs(dv).max() > tol * scale:
        raise ValueError("the singular form is not closed on the excised region")


def singular_boundary_eval(phi: DifferentialForm, excision: ExcisionSpec, psi: DifferentialForm) -> ExcisionResult:
    """``∂T_φ(ψ)`` for a closed form φ singular on a line or point.

    For each tube radius ε the excised integral ``∫_{D_ε} φ ∧ dψ`` equals
    ``(−1)^{p+1} ∫_{S_ε} φ ∧ ψ`` (p = deg φ) with the tube boundary S_ε
    oriented away from the singular set; the values are extrapolated to
    ε = 0.
    """
    if psi.degree != phi.n - phi.degree - 1:
        raise ValueError("test form has the wrong degree for ∂T_φ")
    sign = (-1.0) ** (phi.degree + 1)
    values = []
    for k, eps in enumerate(excision.radii):
        shell = excision.shell(eps, psi.support)
        if k == 0:
            cell = shell.terms[0][0]
            u = np.random.default_rng(1).uniform(0.05, 0.95, (16, cell.r))
            _check_closed(phi, cell(u))
        values.append(sign * integrate(WedgeForm(phi, psi), shell))
    v0, res, slope = richardson(excision.radii, values, excision.order)
    return ExcisionResult(v0, res, slope, tuple(excision.radii), tuple(values))


def excised_volume_eval(phi: DifferentialForm, excision: ExcisionSpec, psi: DifferentialForm,
                        quadrature: Quadrature | None = None, include_zero: bool = False,
                        order: int = 1) -> ExcisionResult:
    """``∂T_φ(ψ) = lim ∫_{D_ε} φ ∧ dψ`` from the excised volume integrals.

    An independent route to :func:`singular_boundary_eval`.  With
    ``include_zero`` the ε = 0 region (no hole) is integrated as well and
    reported as the value; polar parametrizations absorb the singularity of
    forms blowing up like the inverse distance.  The missing tube carries
    an O(ε) share of the integral, hence the default ``order = 1``.
    """
    dpsi = psi.d
    values = [integrate(WedgeForm(phi, dpsi), excision.excised_region(eps, psi.support, quadrature))
              for eps in excision.radii]
    v0, res, slope = richardson(excision.radii, values, order)
    if include_zero:
        v0 = integrate(WedgeForm(phi, dpsi), excision.excised_region(0.0, psi.support, quadrature))
    return ExcisionResult(v0, res, slope, tuple(excision.radii), tuple(values))


class ExcisionBoundaryCurrent(Current):
    """``∂T_φ`` for a singular closed form, evaluated by tube excision."""

    def __init__(self, phi: DifferentialForm, excision: ExcisionSpec, label: str = "∂T_phi"):
        super().__init__(phi.n, phi.n - phi.degree - 1, label)
        self.phi, self.excision = phi, excision
        self.last: ExcisionResult | None = None
        self._cache: dict = {}

    def _evaluate(self, form):
        hit = self._cache.get(id(form))
        if hit is None or hit[0] is not form:
            hit = (form, singular_boundary_eval(self.phi, self.excision, form))
            self._cache[id(form)] = hit
        self.last = hit[1]
        return self.last.value


# ---------------------------------------------------------------------------
# test-form battery
# ---------------------------------------------------------------------------

@dataclass
class Battery:
    """A seeded list of bump × polynomial test forms."""

    n: int
    degree: int
    seed: int
    forms: list = field(repr=False)
    params: list = field(repr=False)

    def __iter__(self):
        return iter(self.forms)

    def __len__(self):
        return len(self.forms)

    def __getitem__(self, k):
        return self.forms[k]

    @property
    def hash(self) -> str:
        blob = json.dumps({"n": self.n, "degree": self.degree, "seed": self.seed, "params": self.params},
                          sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def test_form_battery(n: int, degree: int, seed: int = 0, count: int = 12, center_lo=None, center_hi=None,
                      radius_range=(0.5, 0.8)) -> Battery:
    """``count`` random test forms with centers uniform in a box.

    The polynomial factors have constant terms of magnitude in [0.5, 1.5]
    and small linear and quadratic terms.
    """
    lo = np.full(n, -0.2) if center_lo is None else np.asarray(center_lo, dtype=float)
    hi = np.full(n, 0.2) if center_hi is None else np.asarray(center_hi, dtype=float)
    rng = np.random.default_rng(seed)
    forms, params = [], []
    for _ in range(count):
        c = rng.uniform(lo, hi)
        R = rng.uniform(*radius_range)
        f = random_test_form(rng, n, degree, center=c, radius=R)
        forms.append(f)
        params.append({"center": [round(float(v), 15) for v in c], "radius": round(float(R), 15),
                       "coeffs": [{str(k): round(v, 15) for k, v in sorted(fld.terms[0].terms.items())}
                                  for fld in f.coeffs]})
    return Battery(n, degree, seed, forms, params)


# ---------------------------------------------------------------------------
# Frank's rules and decomposability
# ---------------------------------------------------------------------------

def frank_rule_residual(T: Current, battery: Battery | None = None, seed: int = 0, **battery_kwargs) -> float:
    """``max |∂∂T(ω)|`` over a battery of (dim − 2)-forms (0 when dim < 2)."""
    if T.dim < 2:
        return 0.0
    if battery is None:
        battery = test_form_battery(T.n, T.dim - 2, seed, **battery_kwargs)
    bb = BoundaryCurrent(BoundaryCurrent(T))
    return max(abs(bb.evaluate(w)) for w in battery)


@dataclass(frozen=True)
class FrankReport:
    current: Current
    values: tuple
    references: tuple

    @property
    def max_abs_diff(self) -> float:
        return max(abs(a - b) for a, b in zip(self.values, self.references))

    @property
    def max_boundary(self) -> float:
        return max(abs(v) for v in self.values)


def frank_dislocation_example(u: ScalarField, S, battery: Battery,
                              quadrature: Quadrature | None = None) -> FrankReport:
    """``R(ψ) = ∫_{∂S} u ψ``; compares ``∂R(α)`` with ``−∫_{∂S} du ∧ α``."""
    S = S if isinstance(S, Chain) else Chain([S])
    edge = boundary_chain(S)
    R = ChainCurrent(edge, weight=u, quadrature=quadrature, label="R")
    du = CoefficientForm(u.n, 0, [u]).d
    vals, refs = [], []
    for alpha in battery:
        vals.append(BoundaryCurrent(R).evaluate(alpha))
        refs.append(-integrate(WedgeForm(du, alpha), edge, quadrature))
    return FrankReport(R, tuple(vals), tuple(refs))


@dataclass(frozen=True)
class DecomposabilityProbe:
    decomposable: bool
    residual: float
    scale: float

    def __bool__(self):
        return self.decomposable


def decomposability_probe(T: Current, covectors, battery: Battery, rel_tol: float = 1e-9) -> DecomposabilityProbe:
    """Test ``T ⌞ ψ = 0`` for every ψ in ``covectors`` on a battery.

    ``covectors`` are 1-forms spanning the candidate subbundle; the battery
    holds (dim − 1)-forms.  The residual is compared against ``scale``, the
    largest ``|(T ⌞ dx^i)(ω)|`` over coordinate covectors and the battery,
    so the verdict does not depend on the overall size of T.
    """
    residual = 0.0
    for psi in covectors:
        Tc = ContractFormCurrent(T, psi)
        for w in battery:
            residual = max(residual, abs(Tc.evaluate(w)))
    scale = 0.0
    for i in range(T.n):
        dxi = CoefficientForm(T.n, 1, {(i,): 1.0})
        Tc = ContractFormCurrent(T, dxi)
        for w in battery:
            scale = max(scale, abs(Tc.evaluate(w)))
    scale = max(scale, 1e-300)
    return DecomposabilityProbe(residual <= rel_tol * scale, residual, scale)
