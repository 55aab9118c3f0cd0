"""Truncated Taylor-series arithmetic, vectorized over grid nodes.

A series holds coefficients ``c[0..order]`` of an expansion in a formal
increment; each coefficient may be an array over quadrature nodes.  The
recurrences for ``exp``, ``log`` and ``sqrt`` are the standard ones driven
by the derivative relations, so propagating a density through them yields
exact truncated expansions up to floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    coef: tuple[np.ndarray, ...]

    def __post_init__(self):
        coef = tuple(np.asarray(c, dtype=float) for c in self.coef)
        if not coef:
            raise ValueError("a series needs at least the constant coefficient")
        shape = np.broadcast_shapes(*(c.shape for c in coef))
        coef = tuple(np.broadcast_to(c, shape).copy() for c in coef)
        object.__setattr__(self, "coef", coef)

    @property
    def order(self) -> int:
        return len(self.coef) - 1

    @classmethod
    def constant(cls, value, order: int) -> "TaylorSeries":
        value = np.asarray(value, dtype=float)
        return cls((value,) + tuple(np.zeros_like(value) for _ in range(order)))

    @classmethod
    def increment(cls, base, order: int) -> "TaylorSeries":
        """The series base + epsilon."""
        base = np.asarray(base, dtype=float)
        if order == 0:
            return cls((base,))
        coef = [base, np.ones_like(base)] + [np.zeros_like(base) for _ in range(order - 1)]
        return cls(tuple(coef))

    def _other(self, value) -> "TaylorSeries":
        if isinstance(value, TaylorSeries):
            if value.order != self.order:
                raise ValueError("series orders differ")
            return value
        return TaylorSeries.constant(value, self.order)

    def __add__(self, other) -> "TaylorSeries":
        rhs = self._other(other)
        return TaylorSeries(tuple(a + b for a, b in zip(self.coef, rhs.coef)))

    __radd__ = __add__

    def __neg__(self) -> "TaylorSeries":
        return TaylorSeries(tuple(-a for a in self.coef))

    def __sub__(self, other) -> "TaylorSeries":
        return self + (-self._other(other))

    def __rsub__(self, other) -> "TaylorSeries":
        return self._other(other) - self

    def __mul__(self, other) -> "TaylorSeries":
        rhs = self._other(other)
        out = []
        for k in range(self.order + 1):
            acc = self.coef[0] * rhs.coef[k]
            for j in range(1, k + 1):
                acc = acc + self.coef[j] * rhs.coef[k - j]
            out.append(acc)
        return TaylorSeries(tuple(out))

    __rmul__ = __mul__

    def exp(self) -> "TaylorSeries":
        out = [np.exp(self.coef[0])]
        for k in range(1, self.order + 1):
            acc = np.zeros_like(out[0])
            for j in range(1, k + 1):
                acc = acc + j * self.coef[j] * out[k - j]
            out.append(acc / k)
        return TaylorSeries(tuple(out))

    def log(self) -> "TaylorSeries":
        if np.any(self.coef[0] <= 0):
            raise ValueError("log of a series needs a positive constant term")
        out = [np.log(self.coef[0])]
        for k in range(1, self.order + 1):
            acc = k * self.coef[k]
            for j in range(1, k):
                acc = acc - j * out[j] * self.coef[k - j]
            out.append(acc / (k * self.coef[0]))
        return TaylorSeries(tuple(out))

    def sqrt(self) -> "TaylorSeries":
        """Recursive square-root coefficients; constant term must be positive."""
        if np.any(self.coef[0] < 0):
            raise ValueError("sqrt of a series needs a nonnegative constant term")
        root = np.sqrt(self.coef[0])
        out = [root]
        if self.order == 0:
            return TaylorSeries(tuple(out))
        safe = np.where(root > 0, root, 1.0)
        for k in range(1, self.order + 1):
            acc = self.coef[k]
            for j in range(1, k):
                acc = acc - out[j] * out[k - j]
            coefficient = acc / (2.0 * safe)
            out.append(np.where(root > 0, coefficient, 0.0))
        return TaylorSeries(tuple(out))

    def derivatives(self) -> np.ndarray:
        """Stack of k-th derivatives: k! times the k-th coefficient."""
        return np.stack([math.factorial(k) * c for k, c in enumerate(self.coef)])
