"""Closed axis-aligned boxes used as chart domains."""

from __future__ import annotations

import numpy as np

__all__ = ["Box", "DomainError"]


class DomainError(ValueError):
    """Raised when a field or map is evaluated outside its domain."""


class Box:
    """The closed box ``[lo_0, hi_0] × … × [lo_{n-1}, hi_{n-1}]``.

    Infinite bounds are allowed, so ``Box.whole(n)`` is all of R^n.
    """

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float).reshape(-1)
        self.hi = np.asarray(hi, dtype=float).reshape(-1)
        if self.lo.shape != self.hi.shape or np.any(self.lo > self.hi):
            raise ValueError("box bounds must satisfy lo <= hi componentwise")

    @classmethod
    def whole(cls, n: int) -> "Box":
        return cls(np.full(n, -np.inf), np.full(n, np.inf))

    @classmethod
    def cube(cls, n: int, half_width: float, center=None) -> "Box":
        c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
        return cls(c - half_width, c + half_width)

    @property
    def n(self) -> int:
        return self.lo.size

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.all((x >= self.lo) & (x <= self.hi), axis=1)

    def require(self, x) -> None:
        inside = self.contains(x)
        if not np.all(inside):
            bad = np.atleast_2d(x)[~inside][0]
            raise DomainError(f"point {bad} lies outside the domain {self}")

    def __repr__(self):
        return f"Box(lo={self.lo.tolist()}, hi={self.hi.tolist()})"
