"""Differential forms and multivector fields on chart domains of R^n.

A form of degree p on R^n evaluates on a batch of points to an array of
shape ``(N, C(n, p))`` (coefficients in lexicographic multi-index order).
Leaf forms hold one :class:`~defects.fields.scalar.ScalarField` per
coefficient.  Combinations (sums, wedges, pullbacks) are kept lazy; each
knows its exterior derivative structurally:

* ``d(a + b) = da + db``
* ``d(a ∧ b) = da ∧ b + (-1)^p a ∧ db``
* ``d(f* ω) = f* (dω)``

so the derivative of a pulled-back form never needs second derivatives of
the map.  Forms that can express their coefficients as scalar-field trees
(``coefficient_fields``) also support contraction with vector fields and
Lie derivatives.
"""

from __future__ import annotations

from math import comb

import numpy as np

from ..algebra import (
    AlternatingTensor,
    index_of,
    merge_sign,
    multi_indices,
    pullback_minors_batch,
    wedge_batch,
)
from .domain import Box
from .maps import FieldMap, MapBetweenCharts
from .scalar import (
    BumpPolynomial,
    Composed,
    Constant,
    Polynomial,
    Product,
    ScalarField,
    Sum,
    as_points,
)

__all__ = [
    "DifferentialForm",
    "CoefficientForm",
    "SumForm",
    "WedgeForm",
    "PulledBackForm",
    "MultivectorField",
    "VectorField",
    "eval_form",
    "zero_form",
    "constant_form",
    "test_form",
    "random_test_form",
    "pullback",
    "pullback_explicit",
    "contract_field",
    "lie_derivative",
]


def _intersect(a: Box, b: Box) -> Box:
    return Box(np.maximum(a.lo, b.lo), np.minimum(a.hi, b.hi))


def _field_sum(terms, n):
    terms = [t for t in terms if not t.is_zero()]
    return Sum.of(terms) if terms else Constant(0.0, n)


class DifferentialForm:
    """Abstract p-form on a box in R^n.

    Attributes
    ----------
    n : int
        Ambient dimension.
    degree : int
        Form degree p.
    domain : Box
        Closed box where the form may be evaluated.
    support : tuple or None
        ``(center, radius)`` of a closed ball containing the support, when
        known.  Test forms always carry one.
    """

    def __init__(self, n: int, degree: int, domain: Box | None = None, support=None):
        if not 0 <= degree <= n:
            raise ValueError(f"degree {degree} impossible on R^{n}")
        self.n = int(n)
        self.degree = int(degree)
        self.domain = domain if domain is not None else Box.whole(n)
        self.support = support
        self._d = None

    @property
    def size(self) -> int:
        return comb(self.n, self.degree)

    @property
    def basis(self):
        return multi_indices(self.n, self.degree)

    # evaluation --------------------------------------------------------
    def evaluate(self, x) -> np.ndarray:
        """Coefficients at a batch of points, shape ``(N, C(n, p))``."""
        x = as_points(x, self.n)
        self.domain.require(x)
        return self._evaluate(x)

    __call__ = evaluate

    def at(self, x) -> AlternatingTensor:
        """The p-covector at a single point."""
        return AlternatingTensor(self.n, self.degree, self.evaluate(x)[0])

    def _evaluate(self, x):
        raise NotImplementedError

    # calculus ----------------------------------------------------------
    def exterior_derivative(self) -> "DifferentialForm":
        if self._d is None:
            if self.degree == self.n:
                raise ValueError(f"a top-degree form on R^{self.n} has no exterior derivative")
            self._d = self._derivative()
        return self._d

    @property
    def d(self) -> "DifferentialForm":
        return self.exterior_derivative()

    def _derivative(self):
        fields = self.coefficient_fields()
        return CoefficientForm(self.n, self.degree, fields, self.domain, self.support).d

    def coefficient_fields(self) -> list[ScalarField]:
        """Coefficients as scalar-field expressions (exact derivatives)."""
        raise NotImplementedError(f"{type(self).__name__} has no closed-form coefficients")

    def as_coefficient_form(self) -> "CoefficientForm":
        return CoefficientForm(self.n, self.degree, self.coefficient_fields(), self.domain, self.support)

    def pullback(self, f: MapBetweenCharts) -> "DifferentialForm":
        return pullback(f, self)

    # algebra -----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, DifferentialForm):
            raise TypeError("expected a DifferentialForm")
        if other.n != self.n or other.degree != self.degree:
            raise ValueError(
                f"cannot add a {other.degree}-form on R^{other.n} to a {self.degree}-form on R^{self.n}"
            )

    def __add__(self, other):
        self._check(other)
        return SumForm([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        self._check(other)
        return SumForm([(1.0, self), (-1.0, other)])

    def __neg__(self):
        return SumForm([(-1.0, self)])

    def __mul__(self, s):
        if isinstance(s, ScalarField):
            return WedgeForm(CoefficientForm(self.n, 0, [s]), self)
        return SumForm([(float(s), self)])

    __rmul__ = __mul__

    def __xor__(self, other):
        return WedgeForm(self, other)


class CoefficientForm(DifferentialForm):
    """``Σ_μ ω_μ dx^μ`` with one scalar field per increasing multi-index.

    Parameters
    ----------
    coeffs : list or dict
        Either a full list in lexicographic order, or a mapping from
        multi-index tuples to fields (missing entries are zero).
    """

    def __init__(self, n, degree, coeffs, domain=None, support=None):
        super().__init__(n, degree, domain, support)
        basis = multi_indices(n, degree)
        if isinstance(coeffs, dict):
            idx = index_of(n, degree)
            full = [Constant(0.0, n) for _ in basis]
            for mu, f in coeffs.items():
                mu = tuple(mu)
                if mu not in idx:
                    raise ValueError(f"{mu} is not an increasing {degree}-index in R^{n}")
                full[idx[mu]] = f if isinstance(f, ScalarField) else Constant(float(f), n)
            coeffs = full
        coeffs = [f if isinstance(f, ScalarField) else Constant(float(f), n) for f in coeffs]
        if len(coeffs) != len(basis):
            raise ValueError(f"expected {len(basis)} coefficients, got {len(coeffs)}")
        if any(f.n != n for f in coeffs):
            raise ValueError("coefficient field dimension mismatch")
        self.coeffs = coeffs

    def coefficient(self, mu) -> ScalarField:
        return self.coeffs[index_of(self.n, self.degree)[tuple(mu)]]

    def coefficient_fields(self):
        return self.coeffs

    def _evaluate(self, x):
        memo: dict = {}
        out = np.empty((x.shape[0], len(self.coeffs)))
        for k, f in enumerate(self.coeffs):
            out[:, k] = 0.0 if f.is_zero() else f._eval(x, memo)
        return out

    def _derivative(self):
        n, p = self.n, self.degree
        idx = index_of(n, p)
        out = []
        for rho in multi_indices(n, p + 1):
            terms = []
            for i in rho:
                mu = tuple(j for j in rho if j != i)
                f = self.coeffs[idx[mu]]
                if f.is_zero():
                    continue
                s = merge_sign((i,), mu)
                g = f.partial(i)
                if not g.is_zero():
                    terms.append(g if s > 0 else -g)
            out.append(_field_sum(terms, n))
        return CoefficientForm(n, p + 1, out, self.domain, self.support)

    def __add__(self, other):
        if isinstance(other, CoefficientForm):
            self._check(other)
            return CoefficientForm(
                self.n,
                self.degree,
                [_field_sum([a, b], self.n) for a, b in zip(self.coeffs, other.coeffs)],
                _intersect(self.domain, other.domain),
                _enclosing_ball([self.support, other.support]),
            )
        return super().__add__(other)

    def __mul__(self, s):
        if isinstance(s, (int, float, np.floating)):
            c = Constant(float(s), self.n)
            return CoefficientForm(
                self.n, self.degree, [Product.of(c, f) for f in self.coeffs], self.domain, self.support
            )
        return super().__mul__(s)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        if isinstance(other, CoefficientForm):
            return self + (-other)
        return super().__sub__(other)

    def __repr__(self):
        return f"CoefficientForm(n={self.n}, degree={self.degree})"


class SumForm(DifferentialForm):
    """``Σ c_k ω_k`` for forms of equal degree."""

    def __init__(self, terms):
        first = terms[0][1]
        domain = first.domain
        for _, t in terms[1:]:
            domain = _intersect(domain, t.domain)
        supports = [t.support for _, t in terms]
        support = supports[0] if len(terms) == 1 else _enclosing_ball(supports)
        super().__init__(first.n, first.degree, domain, support)
        self.terms = [(float(c), t) for c, t in terms]

    def _evaluate(self, x):
        out = np.zeros((x.shape[0], self.size))
        for c, t in self.terms:
            if c:
                out += c * t._evaluate(x)
        return out

    def _derivative(self):
        return SumForm([(c, t.d) for c, t in self.terms])

    def coefficient_fields(self):
        cols = [t.coefficient_fields() for _, t in self.terms]
        out = []
        for k in range(self.size):
            out.append(
                _field_sum([Product.of(Constant(c, self.n), col[k]) for (c, _), col in zip(self.terms, cols)], self.n)
            )
        return out


def _enclosing_ball(supports):
    if any(s is None for s in supports):
        return None
    centers = np.array([np.asarray(c, dtype=float) for c, _ in supports])
    mid = 0.5 * (centers.min(axis=0) + centers.max(axis=0))
    return mid, max(np.linalg.norm(np.asarray(c) - mid) + r for c, r in supports)


class WedgeForm(DifferentialForm):
    """``a ∧ b`` evaluated pointwise; ``d`` by the graded Leibniz rule."""

    def __init__(self, a: DifferentialForm, b: DifferentialForm):
        if a.n != b.n:
            raise ValueError("forms live on different spaces")
        if a.degree + b.degree > a.n:
            raise ValueError("wedge degree exceeds the dimension")
        support = a.support if b.support is None else b.support
        if a.support is not None and b.support is not None:
            support = min(a.support, b.support, key=lambda s: s[1])
        super().__init__(a.n, a.degree + b.degree, _intersect(a.domain, b.domain), support)
        self.a, self.b = a, b

    def _evaluate(self, x):
        return wedge_batch(self.a._evaluate(x), self.b._evaluate(x), self.n, self.a.degree, self.b.degree)

    def _derivative(self):
        sign = -1.0 if self.a.degree % 2 else 1.0
        terms = []
        if self.a.degree < self.n and self.a.degree + 1 + self.b.degree <= self.n:
            terms.append((1.0, WedgeForm(self.a.d, self.b)))
        if self.b.degree < self.n and self.a.degree + self.b.degree + 1 <= self.n:
            terms.append((sign, WedgeForm(self.a, self.b.d)))
        return SumForm(terms) if terms else zero_form(self.n, self.degree + 1)

    def coefficient_fields(self):
        fa, fb = self.a.coefficient_fields(), self.b.coefficient_fields()
        p, q, n = self.a.degree, self.b.degree, self.n
        idx = index_of(n, p + q)
        acc: list[list] = [[] for _ in multi_indices(n, p + q)]
        for mu, f in zip(multi_indices(n, p), fa):
            if f.is_zero():
                continue
            for nu, g in zip(multi_indices(n, q), fb):
                s = merge_sign(mu, nu)
                if s and not g.is_zero():
                    term = Product.of(f, g)
                    acc[idx[tuple(sorted(mu + nu))]].append(term if s > 0 else -term)
        return [_field_sum(t, n) for t in acc]


class PulledBackForm(DifferentialForm):
    """``f* ω`` evaluated through the minors of the Jacobian of ``f``."""

    def __init__(self, f: MapBetweenCharts, form: DifferentialForm, domain=None):
        if f.target_dim != form.n:
            raise ValueError("map target dimension does not match the form")
        if form.degree > f.source_dim:
            raise ValueError("pullback of a form of degree larger than the source dimension")
        super().__init__(f.source_dim, form.degree, domain if domain is not None else f.domain)
        self.map, self.form = f, form

    def _evaluate(self, x):
        y = self.map(x)
        w = self.form.evaluate(y)
        if self.degree == 0:
            return w
        minors = pullback_minors_batch(self.map.jacobian(x), self.degree)
        return np.einsum("na,nab->nb", w, minors)

    def _derivative(self):
        if self.form.degree == self.form.n:
            return zero_form(self.n, self.degree + 1, self.domain)
        return PulledBackForm(self.map, self.form.d, self.domain)

    def coefficient_fields(self):
        if not isinstance(self.map, FieldMap):
            raise NotImplementedError("closed-form pullback needs a map with field components")
        return pullback_explicit(self.map, self.form).coeffs


def eval_form(form: DifferentialForm, x) -> AlternatingTensor:
    """Coefficients of ``form`` at the point ``x`` as an :class:`AlternatingTensor`."""
    return form.at(x)


def zero_form(n: int, degree: int, domain=None) -> CoefficientForm:
    return CoefficientForm(n, degree, [Constant(0.0, n)] * comb(n, degree), domain)


def constant_form(n: int, degree: int, components: dict, domain=None) -> CoefficientForm:
    """A form with constant coefficients, e.g. ``{(2,): 1.0}`` for dx^2."""
    return CoefficientForm(n, degree, {tuple(k): float(v) for k, v in components.items()}, domain)


def test_form(center, radius: float, polys: dict, degree: int) -> CoefficientForm:
    """Compactly supported form ``Σ_μ P_μ(x) B(x) dx^μ`` with a bump ``B``.

    ``polys`` maps multi-indices to :class:`Polynomial` (or numbers).
    """
    center = np.asarray(center, dtype=float).reshape(-1)
    n = center.size
    coeffs = {}
    for mu, p in polys.items():
        if not isinstance(p, Polynomial):
            p = Polynomial.constant(float(p), n)
        coeffs[tuple(mu)] = BumpPolynomial.bump(center, radius, p)
    return CoefficientForm(n, degree, coeffs, support=(center, float(radius)))


def random_test_form(rng: np.random.Generator, n: int, degree: int, center=None, radius: float = 1.0,
                     max_poly_degree: int = 2) -> CoefficientForm:
    """A random test form with O(1) constant terms and small higher terms."""
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    polys = {}
    for mu in multi_indices(n, degree):
        terms = {(0,) * n: rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])}
        for i in range(n):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = rng.uniform(-0.5, 0.5)
        if max_poly_degree >= 2:
            for i in range(n):
                for j in range(i, n):
                    e = [0] * n
                    e[i] += 1
                    e[j] += 1
                    terms[tuple(e)] = rng.uniform(-0.25, 0.25)
        polys[mu] = Polynomial(terms, n)
    return test_form(center, radius, polys, degree)


# ---------------------------------------------------------------------------
# pullback
# ---------------------------------------------------------------------------

def pullback(f: MapBetweenCharts, form: DifferentialForm, domain=None) -> DifferentialForm:
    """``f* ω``; its exterior derivative is taken as ``f*(dω)``."""
    return PulledBackForm(f, form, domain)


def _minor_field(comps, rows, cols):
    # Laplace expansion along the first row
    if len(rows) == 1:
        return comps[rows[0]].partial(cols[0])
    terms = []
    for k, c in enumerate(cols):
        entry = comps[rows[0]].partial(c)
        if entry.is_zero():
            continue
        rest = _minor_field(comps, rows[1:], cols[:k] + cols[k + 1:])
        term = Product.of(entry, rest)
        terms.append(term if k % 2 == 0 else -term)
    return _field_sum(terms, comps[0].n)


def pullback_explicit(f: FieldMap, form: DifferentialForm) -> CoefficientForm:
    """``f* ω`` with coefficients built as field expressions.

    Composes each coefficient with the components of ``f`` and multiplies by
    symbolic Jacobian minors.  Independent of :class:`PulledBackForm`, so the
    two routes check each other.
    """
    ns, p = f.source_dim, form.degree
    wf = form.coefficient_fields()
    out = []
    for nu in multi_indices(ns, p):
        terms = []
        for mu, g in zip(multi_indices(f.target_dim, p), wf):
            if g.is_zero():
                continue
            comp = Composed(g, f.components)
            if p == 0:
                terms.append(comp)
                continue
            minor = _minor_field(f.components, mu, nu)
            if not minor.is_zero():
                terms.append(Product.of(comp, minor))
        out.append(_field_sum(terms, ns))
    return CoefficientForm(ns, p, out, f.domain)


# ---------------------------------------------------------------------------
# multivector fields
# ---------------------------------------------------------------------------

class MultivectorField:
    """``Σ_λ w^λ ∂_λ`` with one scalar field per increasing m-index."""

    def __init__(self, n: int, degree: int, components, domain=None):
        self.n, self.degree = int(n), int(degree)
        basis = multi_indices(n, degree)
        if isinstance(components, dict):
            idx = index_of(n, degree)
            full = [Constant(0.0, n) for _ in basis]
            for lam, f in components.items():
                full[idx[tuple(lam)]] = f if isinstance(f, ScalarField) else Constant(float(f), n)
            components = full
        components = [f if isinstance(f, ScalarField) else Constant(float(f), n) for f in components]
        if len(components) != len(basis):
            raise ValueError(f"expected {len(basis)} components, got {len(components)}")
        self.components = components
        self.domain = domain if domain is not None else Box.whole(n)

    def evaluate(self, x) -> np.ndarray:
        x = as_points(x, self.n)
        self.domain.require(x)
        memo: dict = {}
        return np.stack([c._eval(x, memo) for c in self.components], axis=1)

    __call__ = evaluate

    def at(self, x) -> AlternatingTensor:
        return AlternatingTensor(self.n, self.degree, self.evaluate(x)[0], covariant=False)

    def scaled(self, s: float) -> "MultivectorField":
        c = Constant(float(s), self.n)
        return type(self)._rebuild(self, [Product.of(c, f) for f in self.components])

    @staticmethod
    def _rebuild(template, comps):
        if isinstance(template, VectorField):
            return VectorField(comps, template.domain)
        return MultivectorField(template.n, template.degree, comps, template.domain)


class VectorField(MultivectorField):
    def __init__(self, components, domain=None):
        components = list(components)
        n = next((c.n for c in components if isinstance(c, ScalarField)), len(components))
        super().__init__(n, 1, components, domain)

    @classmethod
    def constant(cls, values):
        values = np.asarray(values, dtype=float)
        return cls([Constant(v, values.size) for v in values])

    @classmethod
    def linear(cls, A, b=None):
        """``x ↦ A x + b``."""
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
        comps = []
        for i in range(n):
            terms = {(0,) * n: b[i]}
            for j in range(n):
                e = [0] * n
                e[j] = 1
                terms[tuple(e)] = A[i, j]
            comps.append(Polynomial(terms, n))
        return cls(comps)

    def as_map(self) -> FieldMap:
        return FieldMap(self.components, self.domain)


def contract_field(w: MultivectorField, form: DifferentialForm) -> CoefficientForm:
    """``w ⌟ ω`` with ``(w⌟ω)_ν = Σ_λ sgn(λ, ν) w^λ ω_{λ∪ν}``."""
    n, m, r = form.n, w.degree, form.degree
    if w.n != n:
        raise ValueError("field and form live on different spaces")
    if m > r:
        raise ValueError(f"cannot contract a {m}-vector field with a {r}-form")
    wf = form.coefficient_fields()
    idx = index_of(n, r)
    out = []
    for nu in multi_indices(n, r - m):
        terms = []
        for lam, c in zip(multi_indices(n, m), w.components):
            s = merge_sign(lam, nu)
            if not s or c.is_zero():
                continue
            f = wf[idx[tuple(sorted(lam + nu))]]
            if f.is_zero():
                continue
            term = Product.of(c, f)
            terms.append(term if s > 0 else -term)
        out.append(_field_sum(terms, n))
    return CoefficientForm(n, r - m, out, _intersect(form.domain, w.domain), form.support)


def lie_derivative(w: VectorField, form: DifferentialForm) -> CoefficientForm:
    """``L_w ω = d(w⌟ω) + w⌟dω``."""
    if form.degree == 0:
        # L_w f = w⌟df
        return contract_field(w, form.as_coefficient_form().d)
    first = contract_field(w, form).d
    if form.degree == form.n:
        return first
    second = contract_field(w, form.as_coefficient_form().d)
    return first + second
