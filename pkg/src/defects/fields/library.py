"""Standard forms in Cartesian coordinates and pointwise geometric checks.

Forms written naturally in cylindrical coordinates (r, θ, z) are exposed on
the Cartesian chart of R^3 through

    dr = (x dx + y dy) / r,        dθ = (x dy - y dx) / r^2,

and raise when evaluated closer than ``r_min`` to the z-axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..algebra import AlternatingTensor, is_decomposable, multi_indices, wedge_batch
from .forms import CoefficientForm, DifferentialForm, VectorField
from .scalar import Constant, InverseRadiusPower, Polynomial, Product, Reciprocal, as_points

__all__ = [
    "R_MIN",
    "radius_field",
    "dr_form",
    "dtheta_form",
    "dz_form",
    "screw_form",
    "book_form",
    "director_line_form",
    "cylindrical_volume_form",
    "euclidean_volume_form",
    "director_field",
    "FrobeniusResult",
    "frobenius_check",
]

R_MIN = 1e-8


def radius_field(r_min: float = R_MIN, n: int = 3):
    """Distance to the x3-axis."""
    return InverseRadiusPower(-1, n, r_min=r_min)


def dr_form(r_min: float = R_MIN) -> CoefficientForm:
    inv = InverseRadiusPower(1, 3, r_min=r_min)
    x, y = Polynomial.coordinate(0, 3), Polynomial.coordinate(1, 3)
    return CoefficientForm(3, 1, {(0,): x * inv, (1,): y * inv})


def dtheta_form(r_min: float = R_MIN) -> CoefficientForm:
    inv2 = InverseRadiusPower(2, 3, r_min=r_min)
    x, y = Polynomial.coordinate(0, 3), Polynomial.coordinate(1, 3)
    return CoefficientForm(3, 1, {(0,): -(y * inv2), (1,): x * inv2})


def dz_form() -> CoefficientForm:
    return CoefficientForm(3, 1, {(2,): 1.0})


def screw_form(b: float, r_min: float = R_MIN) -> CoefficientForm:
    """Layering form ``-(b/2π) dθ + dz`` of a screw dislocation along the z-axis."""
    return dtheta_form(r_min) * (-b / (2 * np.pi)) + dz_form()


def book_form(b: float, r_min: float = R_MIN) -> CoefficientForm:
    """``-(b/2π) dθ``: half-planes through the z-axis spread evenly in angle."""
    return dtheta_form(r_min) * (-b / (2 * np.pi))


def director_line_form(r_min: float = R_MIN) -> CoefficientForm:
    """``dθ ∧ dz``, the inclination form of directors radiating from the z-axis."""
    inv2 = InverseRadiusPower(2, 3, r_min=r_min)
    x, y = Polynomial.coordinate(0, 3), Polynomial.coordinate(1, 3)
    # (x dy - y dx) ∧ dz / r^2
    return CoefficientForm(3, 2, {(0, 2): -(y * inv2), (1, 2): x * inv2})


def cylindrical_volume_form() -> CoefficientForm:
    """``r dr ∧ dθ ∧ dz``, which equals dx ∧ dy ∧ dz."""
    return CoefficientForm(3, 3, {(0, 1, 2): 1.0})


def euclidean_volume_form(n: int, scale: float = 1.0) -> CoefficientForm:
    return CoefficientForm(n, n, [Constant(float(scale), n)])


def director_field(phi: DifferentialForm, theta: DifferentialForm, sample_points=None,
                   atol: float = 1e-14) -> VectorField:
    """The vector field ``u`` with ``u ⌟ θ = φ``.

    For an (n-1)-form φ and a volume form θ = θ₀ dx^0∧…∧dx^{n-1},
    ``u^i = (-1)^i φ_{î} / θ₀`` where ``î`` omits index i (0-based).

    Raises
    ------
    ValueError
        If θ₀ vanishes (``|θ₀| <= atol``) at one of the sample points.
    """
    n = phi.n
    if phi.degree != n - 1 or theta.degree != n or theta.n != n:
        raise ValueError("need an (n-1)-form and an n-form on the same R^n")
    if sample_points is not None:
        t0 = theta.evaluate(as_points(sample_points, n))[:, 0]
        if np.any(np.abs(t0) <= atol):
            raise ValueError("volume element vanishes at a sample point")
    pf = phi.coefficient_fields()
    inv = Reciprocal(theta.coefficient_fields()[0])
    basis = multi_indices(n, n - 1)
    comps = []
    for i in range(n):
        hat = tuple(j for j in range(n) if j != i)
        f = Product.of(pf[basis.index(hat)], inv)
        comps.append(f if i % 2 == 0 else -f)
    return VectorField(comps)


@dataclass(frozen=True)
class FrobeniusResult:
    involutive: bool
    residual: float

    def __bool__(self):
        return self.involutive


def frobenius_check(phi: DifferentialForm, points, tol: float = 1e-10) -> FrobeniusResult:
    """Decide involutivity of the distribution annihilated by φ.

    Degree 1 uses ``dφ ∧ φ = 0``; degree n-1 is always involutive (the
    distribution is a line field).  The residual is the largest coefficient
    of ``dφ ∧ φ`` over the samples divided by ``max(1, max|φ|·max|dφ|)``.

    Raises
    ------
    ValueError
        If φ is not decomposable (or vanishes) at a sample point.
    NotImplementedError
        For degrees other than 1 and n-1.
    """
    x = as_points(points, phi.n)
    n, p = phi.n, phi.degree
    if p not in (1, n - 1):
        raise NotImplementedError(f"involutivity test only for degrees 1 and n-1, got {p} on R^{n}")
    vals = phi.evaluate(x)
    for row in vals:
        if not np.any(row):
            raise ValueError("φ vanishes at a sample point")
        if not is_decomposable(AlternatingTensor(n, p, row)):
            raise ValueError("φ is not decomposable at a sample point")
    if p != 1 or n < 3:
        return FrobeniusResult(True, 0.0)
    dvals = phi.d.evaluate(x)
    res = wedge_batch(dvals, vals, n, 2, 1)
    scale = max(1.0, float(np.abs(vals).max() * np.abs(dvals).max()))
    residual = float(np.abs(res).max()) / scale
    return FrobeniusResult(residual <= tol, residual)
