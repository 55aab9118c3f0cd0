"""Discretized base measures and the induced inner product.

A quadrature rule fixes nodes and positive weights so that
``sum(w_i * phi(x_i))`` approximates the integral of ``phi`` against the
base measure.  Counting rules carry unit weights and reproduce finite
sums exactly.  Summation order is fixed (ascending node index) and
compensated, so results are bit-identical regardless of caller
parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

#: densities below this are dropped from jet/residual computations
DENSITY_FLOOR = 1e-300

#: discrete supports are extended until the remaining tail mass is below this
TAIL_MASS_CUTOFF = 1e-14


class RuleMismatchError(ValueError):
    """Grid functions built over different rules were combined."""


def compensated_sum(values: Iterable[float]) -> float:
    """Neumaier-compensated sum in the given (fixed) order."""
    total = 0.0
    comp = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights of a discretized base measure."""

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    support: tuple

    def __post_init__(self):
        nodes = _frozen(np.atleast_1d(self.nodes))
        weights = _frozen(np.atleast_1d(self.weights))
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if not np.all(weights > 0):
            raise ValueError("all quadrature weights must be positive")
        if self.kind == "counting" and not np.all(weights == 1.0):
            raise ValueError("counting rules must carry unit weights")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.nodes.size

    def compatible(self, other: "QuadratureRule") -> bool:
        return (
            self is other
            or (self.kind == other.kind and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.weights, other.weights))
        )

    def grid(self, values: np.ndarray | Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        if callable(values):
            values = values(self.nodes)
        return GridFunction(self, np.asarray(values, dtype=float))

    def integrate(self, values: np.ndarray) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape != self.nodes.shape:
            raise ValueError("value array does not match the rule's nodes")
        return compensated_sum(self.weights * values)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """An element of the discretized L2 space, aligned with a rule's nodes."""

    rule: QuadratureRule
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(np.atleast_1d(self.values))
        if values.shape != self.rule.nodes.shape:
            raise ValueError(
                f"grid function has {values.size} values for a rule with {self.rule.n} nodes"
            )
        object.__setattr__(self, "values", values)

    def norm_squared(self) -> float:
        return inner_product(self, self)


def inner_product(phi: GridFunction, psi: GridFunction) -> float:
    """The discretized pairing sum(w_i * phi_i * psi_i); symmetric, bilinear."""
    if not phi.rule.compatible(psi.rule):
        raise RuleMismatchError("grid functions live on different quadrature rules")
    # grouping the pointwise product first keeps the pairing exactly symmetric
    return compensated_sum(phi.rule.weights * (phi.values * psi.values))


def gauss_legendre(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [a, b]; exact for degree <= 2n-1."""
    if n < 1:
        raise ValueError("node count must be at least 1")
    if not a < b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    t, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (b - a) * t + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w
    return QuadratureRule("gauss-legendre", nodes, weights, ("interval", float(a), float(b)))


def gauss_hermite(n: int, center: float = 0.0, scale: float = 1.0) -> QuadratureRule:
    """n-point Gauss-Hermite rule with weights folded into plain sums.

    Exact for integrands of the form exp(-((x-center)/scale)^2) times a
    polynomial of degree <= 2n-1, so Gaussian-tailed integrands need no
    separate weight function.
    """
    if n < 1:
        raise ValueError("node count must be at least 1")
    if not scale > 0:
        raise ValueError("scale must be positive")
    t, w = np.polynomial.hermite.hermgauss(n)
    nodes = center + scale * t
    weights = scale * np.exp(np.log(w) + t * t)
    return QuadratureRule(
        "gauss-hermite", nodes, weights, ("interval", -np.inf, np.inf)
    )


def counting(support: Sequence[int]) -> QuadratureRule:
    """Counting measure over an explicit point set; weights are exactly 1."""
    points = [float(x) for x in support]
    if not points:
        raise ValueError("support must be nonempty")
    if len(set(points)) != len(points):
        raise ValueError("support points must be distinct")
    return QuadratureRule("counting", np.array(points), np.ones(len(points)), ("points", tuple(points)))


def trapezoid(x: Sequence[float]) -> QuadratureRule:
    """Trapezoid rule on a (possibly nonuniform) strictly increasing grid."""
    nodes = np.asarray(x, dtype=float)
    if nodes.size < 2 or not np.all(np.diff(nodes) > 0):
        raise ValueError("trapezoid grid must be strictly increasing with >= 2 points")
    weights = np.empty_like(nodes)
    weights[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
    weights[0] = 0.5 * (nodes[1] - nodes[0])
    weights[-1] = 0.5 * (nodes[-1] - nodes[-2])
    return QuadratureRule("trapezoid", nodes, weights, ("interval", float(nodes[0]), float(nodes[-1])))
