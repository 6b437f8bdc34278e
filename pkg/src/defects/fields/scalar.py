"""Scalar fields on R^n with exact partial derivatives.

Fields are evaluated on batches of points ``x`` of shape ``(N, n)``.  Every
field can hand out its partial derivative ``partial(i)`` as another field.
For the closed families (polynomials, bumps, inverse radial powers,
sinusoids, and sums/products/quotients/compositions of those) this works to
any order.  Fields built from user callables only know their gradient, so
their partials refuse a further derivative.
"""

from __future__ import annotations

import numpy as np

from .domain import DomainError

__all__ = [
    "as_points",
    "ScalarField",
    "Constant",
    "Polynomial",
    "BumpPolynomial",
    "InverseRadiusPower",
    "Sinusoid",
    "Sum",
    "Product",
    "Reciprocal",
    "Composed",
    "FunctionField",
    "SecondDerivativeUnavailable",
    "BUMP_CLAMP",
]

# q = 1 - s^2 below this is treated as outside the support
BUMP_CLAMP = 1e-12


class SecondDerivativeUnavailable(NotImplementedError):
    pass


def as_points(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != n:
        raise ValueError(f"expected points of shape (N, {n}), got {x.shape}")
    return x


class ScalarField:
    """Base class.  Subclasses implement ``_value`` and usually ``_partial``."""

    n: int

    def __init__(self, n: int):
        self.n = int(n)
        self._partials: dict[int, ScalarField] = {}

    # evaluation --------------------------------------------------------
    def value(self, x) -> np.ndarray:
        return self._eval(as_points(x, self.n), {})

    __call__ = value

    def _eval(self, x, memo):
        key = id(self)
        hit = memo.get(key)
        if hit is None:
            hit = self._value(x, memo)
            memo[key] = hit
        return hit

    def _value(self, x, memo):
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        x = as_points(x, self.n)
        memo: dict = {}
        return np.stack([self.partial(i)._eval(x, memo) for i in range(self.n)], axis=1)

    # differentiation ---------------------------------------------------
    def partial(self, i: int) -> "ScalarField":
        if not 0 <= i < self.n:
            raise IndexError(f"axis {i} out of range for R^{self.n}")
        f = self._partials.get(i)
        if f is None:
            f = self._partial(i)
            self._partials[i] = f
        return f

    def _partial(self, i):
        return _GradientComponent(self, i)

    def is_zero(self) -> bool:
        return False

    # algebra -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ScalarField):
            if other.n != self.n:
                raise ValueError(f"dimension mismatch: R^{self.n} vs R^{other.n}")
            return other
        return Constant(float(other), self.n)

    def __add__(self, other):
        return Sum.of([self, self._coerce(other)])

    __radd__ = __add__

    def __sub__(self, other):
        return Sum.of([self, -self._coerce(other)])

    def __rsub__(self, other):
        return Sum.of([self._coerce(other), -self])

    def __neg__(self):
        return Product.of(Constant(-1.0, self.n), self)

    def __mul__(self, other):
        return Product.of(self, self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarField):
            return Product.of(self, Reciprocal(other))
        return Product.of(self, Constant(1.0 / float(other), self.n))


class _GradientComponent(ScalarField):
    """``d f / d x_i`` for a field that only knows its gradient."""

    def __init__(self, parent, i):
        super().__init__(parent.n)
        self.parent = parent
        self.i = i

    def _value(self, x, memo):
        key = ("grad", id(self.parent))
        g = memo.get(key)
        if g is None:
            g = self.parent._grad(x)
            memo[key] = g
        return g[:, self.i]

    def _partial(self, i):
        raise SecondDerivativeUnavailable(
            f"{type(self.parent).__name__} provides first derivatives only"
        )


class FunctionField(ScalarField):
    """A field given by callables for value and gradient (first order only)."""

    def __init__(self, n, value, gradient):
        super().__init__(n)
        self._value_fn = value
        self._grad_fn = gradient

    def _value(self, x, memo):
        return np.asarray(self._value_fn(x), dtype=float).reshape(x.shape[0])

    def _grad(self, x):
        return np.asarray(self._grad_fn(x), dtype=float).reshape(x.shape[0], self.n)


class Constant(ScalarField):
    def __init__(self, c: float, n: int):
        super().__init__(n)
        self.c = float(c)

    def _value(self, x, memo):
        return np.full(x.shape[0], self.c)

    def _partial(self, i):
        return Constant(0.0, self.n)

    def is_zero(self):
        return self.c == 0.0

    def __repr__(self):
        return f"Constant({self.c})"


class Polynomial(ScalarField):
    """``sum_t c_t prod_i x_i^{e_ti}`` with exponent rows ``exps``."""

    def __init__(self, terms: dict, n: int):
        super().__init__(n)
        clean = {}
        for e, c in terms.items():
            e = tuple(int(k) for k in e)
            if len(e) != n or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e} for R^{n}")
            if c != 0:
                clean[e] = clean.get(e, 0.0) + float(c)
        self.terms = {e: c for e, c in clean.items() if c != 0}
        self._exps = np.array(list(self.terms), dtype=int).reshape(len(self.terms), n)
        self._coefs = np.array(list(self.terms.values()), dtype=float)

    @classmethod
    def constant(cls, c, n):
        return cls({(0,) * n: c}, n)

    @classmethod
    def coordinate(cls, i, n, scale=1.0, shift=0.0):
        e = [0] * n
        e[i] = 1
        return cls({tuple(e): scale, (0,) * n: shift}, n)

    @property
    def degree(self) -> int:
        return int(self._exps.sum(axis=1).max(initial=0))

    def _value(self, x, memo):
        if not self.terms:
            return np.zeros(x.shape[0])
        if self.degree == 0:
            return np.full(x.shape[0], self._coefs.sum())
        mons = np.ones((x.shape[0], len(self._coefs)))
        for i in range(self.n):
            col = self._exps[:, i]
            top = int(col.max())
            if top:
                # power table by repeated products; much cheaper than float pow
                pw = np.empty((x.shape[0], top + 1))
                pw[:, 0] = 1.0
                for k in range(1, top + 1):
                    pw[:, k] = pw[:, k - 1] * x[:, i]
                mons *= pw[:, col]
        return mons @ self._coefs

    def _partial(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = out.get(tuple(d), 0.0) + c * e[i]
        return Polynomial(out, self.n)

    def is_zero(self):
        return not self.terms

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            out: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0.0) + c1 * c2
            return Polynomial(out, self.n)
        if not isinstance(other, ScalarField):
            return Polynomial({e: c * float(other) for e, c in self.terms.items()}, self.n)
        return super().__mul__(other)

    def __add__(self, other):
        if isinstance(other, Polynomial):
            out = dict(self.terms)
            for e, c in other.terms.items():
                out[e] = out.get(e, 0.0) + c
            return Polynomial(out, self.n)
        if not isinstance(other, ScalarField):
            return self + Polynomial.constant(float(other), self.n)
        return super().__add__(other)

    def __repr__(self):
        return f"Polynomial({self.terms})"


class BumpPolynomial(ScalarField):
    """``sum_k P_k(x) q^{-k} B(x)`` for the bump ``B = exp(1 - 1/q)``.

    Here ``q = 1 - |x - c|^2 / R^2``; B is supported in the closed ball of
    radius R about c.  The family is closed under differentiation, which
    gives exact derivatives of any order.  Points with ``q < BUMP_CLAMP``
    evaluate to exactly zero.
    """

    def __init__(self, center, radius: float, terms: dict[int, Polynomial]):
        center = np.asarray(center, dtype=float).reshape(-1)
        super().__init__(center.size)
        self.center = center
        self.radius = float(radius)
        self.terms = {k: p for k, p in terms.items() if not p.is_zero()}

    @classmethod
    def bump(cls, center, radius, poly: Polynomial | None = None):
        center = np.asarray(center, dtype=float).reshape(-1)
        if poly is None:
            poly = Polynomial.constant(1.0, center.size)
        return cls(center, radius, {0: poly})

    def _value(self, x, memo):
        key = ("bump-q", id(self.center), self.radius)
        q = memo.get(key)
        if q is None:
            q = 1.0 - np.sum((x - self.center) ** 2, axis=1) / self.radius**2
            memo[key] = q
        out = np.zeros(x.shape[0])
        inside = q > BUMP_CLAMP
        if not inside.any() or not self.terms:
            return out
        qi = q[inside]
        xi = x[inside]
        log_q = np.log(qi)
        base = 1.0 - 1.0 / qi
        for k, poly in self.terms.items():
            out[inside] += poly._value(xi, {}) * np.exp(base - k * log_q)
        return out

    def _partial(self, i):
        n = self.n
        # d q / d x_i = -2 (x_i - c_i) / R^2
        dq = Polynomial.coordinate(i, n, scale=-2.0 / self.radius**2, shift=2.0 * self.center[i] / self.radius**2)
        out: dict[int, Polynomial] = {}

        def add(k, p):
            out[k] = out[k] + p if k in out else p

        for k, poly in self.terms.items():
            add(k, poly.partial(i))
            prod = poly * dq
            if k:
                add(k + 1, prod * (-float(k)))
            add(k + 2, prod)
        return BumpPolynomial(self.center, self.radius, out)

    def is_zero(self):
        return not self.terms


class InverseRadiusPower(ScalarField):
    """``rho^{-k}`` with ``rho`` the distance to a coordinate axis.

    ``axes`` are the two coordinates spanning the plane orthogonal to the
    singular axis (default x0, x1: the x3-axis in R^3).  Evaluation raises
    when a point lies closer than ``r_min`` to the axis.
    """

    def __init__(self, k: int, n: int, axes=(0, 1), r_min: float = 1e-8):
        super().__init__(n)
        self.k = int(k)
        self.axes = tuple(axes)
        self.r_min = float(r_min)

    def _value(self, x, memo):
        key = ("rho2", self.axes)
        rho2 = memo.get(key)
        if rho2 is None:
            rho2 = x[:, self.axes[0]] ** 2 + x[:, self.axes[1]] ** 2
            memo[key] = rho2
        if np.any(rho2 < self.r_min**2):
            raise DomainError(f"point within r_min={self.r_min:g} of the singular axis")
        return rho2 ** (-0.5 * self.k)

    def _partial(self, i):
        if i not in self.axes:
            return Constant(0.0, self.n)
        return Product.of(
            Polynomial.coordinate(i, self.n, scale=-float(self.k)),
            InverseRadiusPower(self.k + 2, self.n, self.axes, self.r_min),
        )


class Sinusoid(ScalarField):
    """``amp * sin(freq * x_axis + phase)``."""

    def __init__(self, axis: int, n: int, freq: float = 1.0, phase: float = 0.0, amp: float = 1.0):
        super().__init__(n)
        self.axis, self.freq, self.phase, self.amp = int(axis), float(freq), float(phase), float(amp)

    def _value(self, x, memo):
        return self.amp * np.sin(self.freq * x[:, self.axis] + self.phase)

    def _partial(self, i):
        if i != self.axis or self.amp == 0 or self.freq == 0:
            return Constant(0.0, self.n)
        return Sinusoid(self.axis, self.n, self.freq, self.phase + np.pi / 2, self.amp * self.freq)


class Sum(ScalarField):
    def __init__(self, terms):
        super().__init__(terms[0].n)
        self.terms = list(terms)

    @staticmethod
    def of(terms):
        flat = []
        for t in terms:
            if isinstance(t, Sum):
                flat.extend(t.terms)
            elif not t.is_zero():
                flat.append(t)
        if not flat:
            return Constant(0.0, terms[0].n)
        if len(flat) == 1:
            return flat[0]
        return Sum(flat)

    def _value(self, x, memo):
        out = self.terms[0]._eval(x, memo).copy()
        for t in self.terms[1:]:
            out += t._eval(x, memo)
        return out

    def _partial(self, i):
        return Sum.of([t.partial(i) for t in self.terms])


class Product(ScalarField):
    def __init__(self, a, b):
        super().__init__(a.n)
        self.a, self.b = a, b

    @staticmethod
    def of(a, b):
        if a.is_zero() or b.is_zero():
            return Constant(0.0, a.n)
        if isinstance(a, Constant) and isinstance(b, Constant):
            return Constant(a.c * b.c, a.n)
        if isinstance(b, Constant):
            a, b = b, a
        if isinstance(a, Constant) and a.c == 1.0:
            return b
        if isinstance(a, Constant) and isinstance(b, Product) and isinstance(b.a, Constant):
            return Product.of(Constant(a.c * b.a.c, a.n), b.b)
        return Product(a, b)

    def _value(self, x, memo):
        return self.a._eval(x, memo) * self.b._eval(x, memo)

    def _partial(self, i):
        return Sum.of([Product.of(self.a.partial(i), self.b), Product.of(self.a, self.b.partial(i))])


class Reciprocal(ScalarField):
    def __init__(self, f):
        super().__init__(f.n)
        self.f = f

    def _value(self, x, memo):
        return 1.0 / self.f._eval(x, memo)

    def _partial(self, i):
        fi = self.f.partial(i)
        if fi.is_zero():
            return Constant(0.0, self.n)
        return Product.of(Product.of(Constant(-1.0, self.n), fi), Product.of(self, self))


class Composed(ScalarField):
    """``f ∘ g`` for a field ``f`` on R^m and a map ``g`` with field components.

    The chain rule is applied symbolically, so derivatives are as exact and
    as deep as those of ``f`` and of the components of ``g``.
    """

    def __init__(self, f: ScalarField, components):
        super().__init__(components[0].n)
        if len(components) != f.n:
            raise ValueError("map target dimension does not match the field")
        self.f = f
        self.components = list(components)

    def _value(self, x, memo):
        key = ("compose", tuple(id(c) for c in self.components))
        y = memo.get(key)
        if y is None:
            y = np.stack([c._eval(x, memo) for c in self.components], axis=1)
            memo[key] = y
        inner = memo.setdefault(("compose-memo",) + key, {})
        return self.f._eval(y, inner)

    def _partial(self, i):
        return Sum.of(
            [
                Product.of(Composed(self.f.partial(j), self.components), c.partial(i))
                for j, c in enumerate(self.components)
            ]
        )
