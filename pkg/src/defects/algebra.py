"""Pointwise exterior algebra over R^n.

k-covectors and k-vectors are stored densely as coefficient vectors over the
increasing multi-indices of length k, listed in lexicographic order (the order
of ``itertools.combinations``).  Axis indices are 0-based throughout.

Besides the single-point :class:`AlternatingTensor` value object, the module
exposes batched kernels (``*_batch``) acting on arrays of shape ``(N, C)``;
the field and current layers are built on those.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

__all__ = [
    "multi_indices",
    "index_of",
    "check_multi_index",
    "merge_sign",
    "complement",
    "AlternatingTensor",
    "Subspace",
    "Decomposability",
    "dx",
    "e",
    "scalar",
    "covector",
    "vector",
    "wedge",
    "contract_vector",
    "contract_multivector",
    "inner_fcontr",
    "annihilator",
    "is_decomposable",
    "kernel",
    "wedge_batch",
    "contract_batch",
    "inner_fcontr_batch",
    "pullback_minors_batch",
]


# ---------------------------------------------------------------------------
# Multi-index bookkeeping
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Increasing k-multi-indices over ``range(n)`` in basis order."""
    if k < 0 or k > n:
        return ()
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def index_of(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {mu: i for i, mu in enumerate(multi_indices(n, k))}


def check_multi_index(mu: Sequence[int], n: int) -> tuple[int, ...]:
    """Validate ``mu`` as a strictly increasing multi-index over ``range(n)``."""
    mu = tuple(int(i) for i in mu)
    if len(mu) > n:
        raise ValueError(f"multi-index {mu} longer than n={n}")
    if any(i < 0 or i >= n for i in mu):
        raise ValueError(f"multi-index {mu} has entries outside 0..{n - 1}")
    if any(a >= b for a, b in zip(mu, mu[1:])):
        raise ValueError(f"multi-index {mu} is not strictly increasing")
    return mu


@lru_cache(maxsize=None)
def merge_sign(mu: tuple[int, ...], nu: tuple[int, ...]) -> int:
    """Sign of the permutation sorting the concatenation ``mu + nu``.

    Returns 0 when the two indices share an entry (degenerate merge).
    """
    if set(mu) & set(nu):
        return 0
    inversions = sum(1 for a in mu for b in nu if a > b)
    return -1 if inversions % 2 else 1


def complement(mu: tuple[int, ...], n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if i not in mu)


# ---------------------------------------------------------------------------
# Batched kernels
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _wedge_matrix(n: int, p: int, q: int) -> np.ndarray:
    rows = multi_indices(n, p)
    cols = multi_indices(n, q)
    out = index_of(n, p + q)
    mat = np.zeros((len(rows) * len(cols), max(len(multi_indices(n, p + q)), 1)))
    for i, mu in enumerate(rows):
        for j, nu in enumerate(cols):
            s = merge_sign(mu, nu)
            if s:
                mat[i * len(cols) + j, out[tuple(sorted(mu + nu))]] = s
    mat.setflags(write=False)
    return mat


def wedge_batch(a: np.ndarray, b: np.ndarray, n: int, p: int, q: int) -> np.ndarray:
    """Wedge of batched p- and q-(co)vectors, shapes ``(N, C(n,p))``, ``(N, C(n,q))``."""
    if p + q > n:
        return np.zeros((a.shape[0], 0))
    outer = (a[:, :, None] * b[:, None, :]).reshape(a.shape[0], -1)
    return outer @ _wedge_matrix(n, p, q)


@lru_cache(maxsize=None)
def _contract_tensor(n: int, m: int, r: int) -> np.ndarray:
    # (v ⌟ w)_nu = sum_lam sign(lam, nu) v^lam w_{lam ∪ nu}
    lams = multi_indices(n, m)
    nus = multi_indices(n, r - m)
    rhos = index_of(n, r)
    ten = np.zeros((len(lams), len(multi_indices(n, r)), len(nus)))
    for a, lam in enumerate(lams):
        for c, nu in enumerate(nus):
            s = merge_sign(lam, nu)
            if s:
                ten[a, rhos[tuple(sorted(lam + nu))], c] = s
    ten.setflags(write=False)
    return ten


def contract_batch(v: np.ndarray, w: np.ndarray, n: int, m: int, r: int) -> np.ndarray:
    """Batched ``v ⌟ w`` for m-vectors ``v`` and r-covectors ``w`` (m <= r)."""
    return np.einsum("na,nb,abc->nc", v, w, _contract_tensor(n, m, r))


@lru_cache(maxsize=None)
def _fcontr_tensor(n: int, r: int, k: int) -> np.ndarray:
    # (v ⌞ w)^lam = sum_mu sign(lam, mu) w_mu v^{lam ∪ mu}
    mus = multi_indices(n, k)
    lams = multi_indices(n, r - k)
    rhos = index_of(n, r)
    ten = np.zeros((len(multi_indices(n, r)), len(mus), len(lams)))
    for b, mu in enumerate(mus):
        for c, lam in enumerate(lams):
            s = merge_sign(lam, mu)
            if s:
                ten[rhos[tuple(sorted(lam + mu))], b, c] = s
    ten.setflags(write=False)
    return ten


def inner_fcontr_batch(v: np.ndarray, w: np.ndarray, n: int, r: int, k: int) -> np.ndarray:
    """Batched ``v ⌞ w`` for r-vectors ``v`` and k-covectors ``w`` (k <= r)."""
    return np.einsum("na,nb,abc->nc", v, w, _fcontr_tensor(n, r, k))


def pullback_minors_batch(jac: np.ndarray, k: int) -> np.ndarray:
    """k×k minors of a batch of Jacobians.

    ``jac`` has shape ``(N, n_target, n_source)``.  Returns an array of shape
    ``(N, C(n_target, k), C(n_source, k))`` whose entry ``[:, mu, nu]`` is the
    determinant of rows ``mu`` and columns ``nu``; contracting target form
    coefficients with it gives the pulled-back coefficients.
    """
    N, nt, ns = jac.shape
    rows = multi_indices(nt, k)
    cols = multi_indices(ns, k)
    out = np.empty((N, len(rows), len(cols)))
    if k == 0:
        out[...] = 1.0
        return out
    for a, mu in enumerate(rows):
        sub = jac[:, mu, :]
        for b, nu in enumerate(cols):
            block = sub[:, :, nu]
            if k == 1:
                out[:, a, b] = block[:, 0, 0]
            elif k == 2:
                out[:, a, b] = block[:, 0, 0] * block[:, 1, 1] - block[:, 0, 1] * block[:, 1, 0]
            else:
                out[:, a, b] = np.linalg.det(block)
    return out


# ---------------------------------------------------------------------------
# Value objects
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlternatingTensor:
    """A k-covector (``covariant=True``) or k-vector at a point of R^n.

    ``coeffs[i]`` is the coefficient on the i-th increasing multi-index of
    length ``degree``; absent components are zero by construction.
    """

    n: int
    degree: int
    coeffs: np.ndarray
    covariant: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if not 0 <= self.degree <= self.n:
            # degree overflow is legal for wedge results: the zero tensor
            c = np.zeros(0)
        elif c.size != comb(self.n, self.degree):
            raise ValueError(
                f"expected {comb(self.n, self.degree)} coefficients for degree "
                f"{self.degree} in R^{self.n}, got {c.size}"
            )
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, n: int, degree: int, components: dict, covariant: bool = True):
        c = np.zeros(comb(n, degree))
        idx = index_of(n, degree)
        for mu, val in components.items():
            mu = check_multi_index(mu, n)
            if len(mu) != degree:
                raise ValueError(f"multi-index {mu} does not have length {degree}")
            c[idx[mu]] += val
        return cls(n, degree, c, covariant)

    @property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        return multi_indices(self.n, self.degree)

    def components(self, tol: float = 0.0) -> dict[tuple[int, ...], float]:
        return {mu: float(c) for mu, c in zip(self.basis, self.coeffs) if abs(c) > tol}

    def __getitem__(self, mu) -> float:
        mu = check_multi_index(mu, self.n)
        return float(self.coeffs[index_of(self.n, self.degree)[mu]])

    def _like(self, coeffs) -> "AlternatingTensor":
        return AlternatingTensor(self.n, self.degree, coeffs, self.covariant)

    def _check_compatible(self, other):
        if not isinstance(other, AlternatingTensor):
            return NotImplemented
        if (other.n, other.degree, other.covariant) != (self.n, self.degree, self.covariant):
            raise ValueError("incompatible alternating tensors")

    def __add__(self, other):
        self._check_compatible(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, s):
        return self._like(float(s) * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self._like(self.coeffs / float(s))

    def __xor__(self, other):
        return wedge(self, other)

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs), initial=0.0))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return (
            (self.n, self.degree, self.covariant) == (other.n, other.degree, other.covariant)
            and bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))
        )

    def __call__(self, *vectors) -> float:
        """Evaluate a k-covector on k vectors, ``sum_mu w_mu det(V[mu, :])``."""
        if not self.covariant:
            raise TypeError("only covectors can be evaluated on vectors")
        if len(vectors) != self.degree:
            raise ValueError(f"expected {self.degree} vectors, got {len(vectors)}")
        if self.degree == 0:
            return float(self.coeffs[0])
        V = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
        minors = pullback_minors_batch(V[None], self.degree)[0, :, 0]
        return float(minors @ self.coeffs)

    def pair(self, other: "AlternatingTensor") -> float:
        """Full pairing of a k-covector with a k-vector (dual bases)."""
        if self.covariant == other.covariant or self.degree != other.degree:
            raise ValueError("pairing needs a k-covector and a k-vector")
        return float(self.coeffs @ other.coeffs)

    def __repr__(self):
        kind = "dx" if self.covariant else "e"
        terms = [
            f"{c:+.6g} {kind}{''.join(str(i) for i in mu)}" if mu else f"{c:+.6g}"
            for mu, c in self.components().items()
        ]
        return f"AlternatingTensor(n={self.n}, {' '.join(terms) or '0'})"


def scalar(c: float, n: int, covariant: bool = True) -> AlternatingTensor:
    return AlternatingTensor(n, 0, [c], covariant)


def dx(i: int, n: int) -> AlternatingTensor:
    """Basis covector dx^i (0-based)."""
    return AlternatingTensor.from_dict(n, 1, {(i,): 1.0})


def e(i: int, n: int) -> AlternatingTensor:
    """Basis vector e_i (0-based)."""
    return AlternatingTensor.from_dict(n, 1, {(i,): 1.0}, covariant=False)


def covector(values) -> AlternatingTensor:
    values = np.asarray(values, dtype=float)
    return AlternatingTensor(values.size, 1, values)


def vector(values) -> AlternatingTensor:
    values = np.asarray(values, dtype=float)
    return AlternatingTensor(values.size, 1, values, covariant=False)


def wedge(a: AlternatingTensor, b: AlternatingTensor) -> AlternatingTensor:
    """Alternating product; degree overflow gives the (empty) zero tensor."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: R^{a.n} vs R^{b.n}")
    if a.covariant != b.covariant:
        raise ValueError("cannot wedge a covector with a vector")
    deg = a.degree + b.degree
    if deg > a.n:
        return AlternatingTensor(a.n, deg, [], a.covariant)
    out = wedge_batch(a.coeffs[None], b.coeffs[None], a.n, a.degree, b.degree)[0]
    return AlternatingTensor(a.n, deg, out, a.covariant)


def contract_vector(v: AlternatingTensor, w: AlternatingTensor) -> AlternatingTensor:
    """``v ⌟ w`` with ``(v ⌟ w)(u_1, ...) = w(v, u_1, ...)``."""
    if v.covariant or v.degree != 1:
        raise ValueError("first argument must be a vector")
    if not w.covariant:
        raise ValueError("second argument must be a covector")
    if w.degree == 0:
        raise ValueError("cannot contract a 0-covector")
    return contract_multivector(v, w)


def contract_multivector(v: AlternatingTensor, w: AlternatingTensor) -> AlternatingTensor:
    """``v ⌟ w`` for an m-vector and r-covector, ``(v ⌟ w)(u) = w(v ∧ u)``."""
    if v.n != w.n:
        raise ValueError(f"dimension mismatch: R^{v.n} vs R^{w.n}")
    if v.covariant or not w.covariant:
        raise ValueError("expected a multivector and a covector")
    if v.degree > w.degree:
        raise ValueError(f"cannot contract a {v.degree}-vector into a {w.degree}-covector")
    out = contract_batch(v.coeffs[None], w.coeffs[None], v.n, v.degree, w.degree)[0]
    return AlternatingTensor(v.n, w.degree - v.degree, out)


def inner_fcontr(v: AlternatingTensor, w: AlternatingTensor) -> AlternatingTensor:
    """``v ⌞ w``: the (r-k)-vector with ``g(v ⌞ w) = (g ∧ w)(v)`` for all g."""
    if v.n != w.n:
        raise ValueError(f"dimension mismatch: R^{v.n} vs R^{w.n}")
    if v.covariant or not w.covariant:
        raise ValueError("expected a multivector and a covector")
    if w.degree > v.degree:
        raise ValueError(f"cannot contract a {w.degree}-covector into a {v.degree}-vector")
    out = inner_fcontr_batch(v.coeffs[None], w.coeffs[None], v.n, v.degree, w.degree)[0]
    return AlternatingTensor(v.n, v.degree - w.degree, out, covariant=False)


# ---------------------------------------------------------------------------
# Kernels, subspaces, decomposability
# ---------------------------------------------------------------------------

def kernel(mat: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Null-space basis of ``mat`` (rows of the result) by Gaussian elimination
    with complete pivoting; pivots below ``rel_tol * max|mat|`` count as zero."""
    A = np.array(mat, dtype=float, copy=True)
    rows, cols = A.shape
    scale = np.max(np.abs(A), initial=0.0)
    perm = np.arange(cols)
    rank = 0
    if scale > 0:
        thresh = rel_tol * scale
        for k in range(min(rows, cols)):
            sub = np.abs(A[k:, k:])
            i, j = np.unravel_index(np.argmax(sub), sub.shape)
            if sub[i, j] <= thresh:
                break
            i += k
            j += k
            A[[k, i]] = A[[i, k]]
            A[:, [k, j]] = A[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
            A[k] /= A[k, k]
            others = np.arange(rows) != k
            A[others] -= np.outer(A[others, k], A[k])
            rank += 1
    free = cols - rank
    basis = np.zeros((free, cols))
    for f in range(free):
        z = np.zeros(cols)
        z[rank + f] = 1.0
        z[:rank] = -A[:rank, rank + f]
        basis[f, perm] = z
    return basis


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^n (or its dual) given by a basis of rows."""

    n: int
    basis: np.ndarray
    dual: bool = False

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float).reshape(-1, self.n)
        if b.shape[0] and np.linalg.matrix_rank(b, tol=1e-10 * max(1.0, np.abs(b).max())) != b.shape[0]:
            raise ValueError("basis is not linearly independent")
        object.__setattr__(self, "basis", b)

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        if self.dimension == 0:
            return np.zeros((self.n, self.n))
        q, _ = np.linalg.qr(self.basis.T)
        return q @ q.T

    def distance(self, other: "Subspace") -> float:
        """Frobenius distance between orthogonal projectors."""
        return float(np.linalg.norm(self.projector() - other.projector()))

    def same_as(self, other: "Subspace", tol: float = 1e-10) -> bool:
        return self.n == other.n and self.distance(other) < tol

    def contains(self, v, tol: float = 1e-10) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.linalg.norm(v - self.projector() @ v) <= tol * max(1.0, np.linalg.norm(v)))


@dataclass(frozen=True)
class Decomposability:
    """Outcome of :func:`is_decomposable`; truthy when decomposable."""

    decomposable: bool
    residual: float
    factors: tuple | None = None

    def __bool__(self):
        return self.decomposable


def _wedge_with_covectors_matrix(w: AlternatingTensor) -> np.ndarray:
    # column i holds the coefficients of dx^i ∧ w
    cols = [wedge(dx(i, w.n), w).coeffs for i in range(w.n)]
    return np.column_stack(cols) if cols and cols[0].size else np.zeros((0, w.n))


def _factorize(w: AlternatingTensor) -> tuple | None:
    if w.degree == 0:
        return ()
    if w.norm() == 0:
        return None
    ker = kernel(_wedge_with_covectors_matrix(w), rel_tol=1e-10)
    if ker.shape[0] != w.degree:
        return None
    factors = [covector(row) for row in ker]
    prod = factors[0]
    for f in factors[1:]:
        prod = wedge(prod, f)
    j = int(np.argmax(np.abs(w.coeffs)))
    if abs(prod.coeffs[j]) == 0:
        return None
    factors[0] = factors[0] * (w.coeffs[j] / prod.coeffs[j])
    return tuple(factors)


def is_decomposable(w: AlternatingTensor, rel_tol: float = 1e-10) -> Decomposability:
    """Decide whether ``w`` is a product of 1-(co)vectors.

    Degrees 0, 1, n-1 and n are always decomposable.  Otherwise the Plücker
    relations ``(xi ⌟ w) ∧ w = 0`` are tested for every basis (k-1)-vector xi,
    relative to ``max|w|``.
    """
    k, n = w.degree, w.n
    scale = w.norm()
    if k in (0, 1, n - 1, n) or scale == 0:
        factors = _factorize(w) if w.covariant else None
        return Decomposability(True, 0.0, factors)
    probe = w if w.covariant else AlternatingTensor(n, k, w.coeffs)
    residual = 0.0
    for mu in multi_indices(n, k - 1):
        xi = AlternatingTensor.from_dict(n, k - 1, {mu: 1.0}, covariant=False)
        r = wedge(contract_multivector(xi, probe), probe)
        residual = max(residual, r.norm())
    ok = residual < rel_tol * scale * scale
    factors = _factorize(probe) if ok and w.covariant else None
    return Decomposability(bool(ok), residual / (scale * scale), factors)


def annihilator(phi: AlternatingTensor) -> Subspace:
    """The subspace ``{v : v ⌟ phi = 0}`` of a nonzero decomposable p-covector."""
    if not phi.covariant:
        raise ValueError("annihilator expects a covector")
    if phi.norm() == 0:
        raise ValueError("annihilator of the zero covector is undefined")
    if not is_decomposable(phi):
        raise ValueError("covector is not decomposable")
    n, p = phi.n, phi.degree
    if p == 0:
        return Subspace(n, np.eye(n))
    mat = np.column_stack([contract_vector(e(i, n), phi).coeffs for i in range(n)])
    ker = kernel(mat)
    if ker.shape[0] != n - p:
        raise ArithmeticError(f"kernel dimension {ker.shape[0]} != {n - p}")
    return Subspace(n, ker)
