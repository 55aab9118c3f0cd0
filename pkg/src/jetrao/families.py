"""Parametric families and their square-root derivative stacks.

Each family exposes the truncated expansion of its density in the
parameter increment at every grid node; taking the series square root
and rescaling by factorials yields the stack of parameter-derivatives
of sqrt(density), which is what every bound computation consumes.
Closed-form derivatives exist for the built-in families but are kept in
the test suite as oracles only; the series route is the one uniform
mechanism, cross-checked here by a finite-difference oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.special import gammaln
from scipy.stats import poisson as _poisson

from .measures import (
    DENSITY_FLOOR,
    TAIL_MASS_CUTOFF,
    GridFunction,
    QuadratureRule,
    compensated_sum,
    counting,
    gauss_hermite,
    gauss_legendre,
    inner_product,
    trapezoid,
)
from .series import TaylorSeries

MAX_JET_ORDER = 8


class UnbiasednessError(ValueError):
    """A declared-unbiased estimator failed its numerical check."""


@dataclass(frozen=True, eq=False)
class ParametricFamily:
    """A scalar-parameter density family on a one-dimensional sample space."""

    name: str
    domain: tuple[float, float]
    parameters: dict
    density_series: Callable[[np.ndarray, float, int], TaylorSeries]
    recommended_rule: Callable[..., QuadratureRule]
    rule_hint: str
    norm_tolerance: float = 1e-8
    max_jet_order: int = MAX_JET_ORDER

    def density(self, x: np.ndarray, theta: float) -> np.ndarray:
        return self.density_series(np.asarray(x, dtype=float), theta, 0).coef[0]

    def check_theta(self, theta: float) -> float:
        lo, hi = self.domain
        if not lo < theta < hi:
            raise ValueError(f"theta={theta} outside the open domain ({lo}, {hi}) of {self.name}")
        return float(theta)


@dataclass(frozen=True, eq=False)
class SqrtJet:
    """Rows k = 0..order of the k-th parameter-derivative of sqrt(density)."""

    theta: float
    order: int
    rows: tuple[GridFunction, ...]
    method: str
    rule: QuadratureRule
    dropped_mass: float
    norm_defect: float

    def row(self, k: int) -> GridFunction:
        return self.rows[k]


@dataclass(frozen=True, eq=False)
class EstimatorSpec:
    """A statistic with its target functional; unbiasedness is checked, not trusted."""

    name: str
    statistic: Callable[[np.ndarray], np.ndarray]
    psi: Callable[[float], float]
    psi_prime: Callable[[float], float] | None = None


# -- built-in families ---------------------------------------------------------


def _pad(coefs: Sequence[np.ndarray], order: int) -> TaylorSeries:
    coefs = [np.asarray(c, dtype=float) for c in coefs]
    shape = np.broadcast_shapes(*(c.shape for c in coefs))
    zero = np.zeros(shape)
    out = list(coefs[: order + 1])
    while len(out) < order + 1:
        out.append(zero)
    return TaylorSeries(tuple(out))


def _gaussian_mean(sigma: float) -> ParametricFamily:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))

    def density_series(x, theta, order):
        d = x - theta
        exponent = _pad(
            [-(d * d) / (2.0 * sigma**2), d / sigma**2, np.full_like(d, -0.5 / sigma**2)],
            order,
        )
        return exponent.exp() * norm

    def rule(theta, n: int = 80):
        return gauss_hermite(n, center=theta, scale=sigma * math.sqrt(2.0))

    return ParametricFamily(
        name="gaussian-mean",
        domain=(-math.inf, math.inf),
        parameters={"sigma": sigma},
        density_series=density_series,
        recommended_rule=rule,
        rule_hint="gauss-hermite matched to the fixed-sigma Gaussian factor",
    )


def _poisson_support(theta: float) -> int:
    top = int(_poisson.isf(TAIL_MASS_CUTOFF, theta)) + 2
    while _poisson.sf(top, theta) >= TAIL_MASS_CUTOFF:
        top += max(2, top // 10)
    return top


def _poisson_rate() -> ParametricFamily:
    def density_series(x, theta, order):
        rate = TaylorSeries.increment(theta, order)
        log_pmf = rate.log() * x - rate - gammaln(x + 1.0)
        return log_pmf.exp()

    def rule(theta, n: int | None = None):
        top = (n - 1) if n else _poisson_support(theta)
        return counting(range(top + 1))

    return ParametricFamily(
        name="poisson-rate",
        domain=(0.0, math.inf),
        parameters={},
        density_series=density_series,
        recommended_rule=rule,
        rule_hint="counting on 0..N with N set by the tail-mass cutoff",
    )


def _bernoulli() -> ParametricFamily:
    def density_series(x, theta, order):
        const = x * theta + (1.0 - x) * (1.0 - theta)
        slope = 2.0 * x - 1.0
        return _pad([const, slope], order)

    def rule(theta, n: int | None = None):
        return counting([0, 1])

    return ParametricFamily(
        name="bernoulli",
        domain=(0.0, 1.0),
        parameters={},
        density_series=density_series,
        recommended_rule=rule,
        rule_hint="counting on {0, 1}",
    )


def _exponential_rate() -> ParametricFamily:
    # e^{-34} < 1e-14, so [0, 34/theta] carries all but a negligible tail
    tail_cut = 34.0

    def density_series(x, theta, order):
        rate = TaylorSeries.increment(theta, order)
        return (rate * (-x)).exp() * rate

    def rule(theta, n: int = 240):
        return gauss_legendre(n, 0.0, tail_cut / theta)

    return ParametricFamily(
        name="exponential-rate",
        domain=(0.0, math.inf),
        parameters={},
        density_series=density_series,
        recommended_rule=rule,
        rule_hint="gauss-legendre on the truncated ray [0, 34/theta]",
    )


_BUILTINS: dict[str, Callable[..., ParametricFamily]] = {
    "gaussian-mean": _gaussian_mean,
    "poisson-rate": lambda: _poisson_rate(),
    "bernoulli": lambda: _bernoulli(),
    "exponential-rate": lambda: _exponential_rate(),
}

FAMILY_INFO = {
    "gaussian-mean": {
        "parameters": {"sigma": "fixed standard deviation (> 0), default 1"},
        "theta_domain": "(-inf, inf)",
        "rule": "gauss-hermite",
    },
    "poisson-rate": {
        "parameters": {},
        "theta_domain": "(0, inf)",
        "rule": "counting",
    },
    "bernoulli": {
        "parameters": {},
        "theta_domain": "(0,1)",
        "rule": "counting",
    },
    "exponential-rate": {
        "parameters": {},
        "theta_domain": "(0, inf)",
        "rule": "gauss-legendre",
    },
}


def builtin(name: str, **parameters) -> ParametricFamily:
    """Construct a built-in family by name."""
    if name == "gaussian-mean":
        return _gaussian_mean(float(parameters.pop("sigma", 1.0)))
    if parameters:
        raise ValueError(f"family {name!r} takes no parameters, got {sorted(parameters)}")
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(
            f"unknown family {name!r}; built-ins are {sorted(_BUILTINS)}"
        ) from None


# -- square-root jets ----------------------------------------------------------


def sqrt_jet(
    family: ParametricFamily,
    theta: float,
    rule: QuadratureRule | None = None,
    order: int = 1,
    norm_tolerance: float | None = None,
) -> SqrtJet:
    """Evaluate the derivative stack of sqrt(density) on the rule's nodes."""
    theta = family.check_theta(theta)
    if not 1 <= order <= family.max_jet_order:
        raise ValueError(f"jet order must lie in 1..{family.max_jet_order}")
    if rule is None:
        rule = family.recommended_rule(theta)
    series = family.density_series(rule.nodes, theta, order)
    f = series.coef[0]
    keep = f >= DENSITY_FLOOR
    dropped_mass = 0.0
    if not np.all(keep):
        dropped_mass = compensated_sum(rule.weights[~keep] * f[~keep])
        series = TaylorSeries(tuple(np.where(keep, c, 0.0) for c in series.coef))
    stack = series.sqrt().derivatives()
    rows = tuple(rule.grid(stack[k]) for k in range(order + 1))
    norm_defect = abs(inner_product(rows[0], rows[0]) - 1.0)
    tolerance = family.norm_tolerance if norm_tolerance is None else norm_tolerance
    if norm_defect > tolerance:
        raise ValueError(
            f"sqrt(density) norm defect {norm_defect:.3e} exceeds tolerance {tolerance:.1e}; "
            "the rule does not resolve this family at this theta"
        )
    return SqrtJet(
        theta=theta,
        order=order,
        rows=rows,
        method="series",
        rule=rule,
        dropped_mass=dropped_mass,
        norm_defect=norm_defect,
    )


def fd_jet_oracle(
    family: ParametricFamily,
    theta: float,
    rule: QuadratureRule | None = None,
    order: int = 1,
    step: float | None = None,
) -> SqrtJet:
    """Finite-difference derivative stack with one Richardson extrapolation.

    Central stencils of second order, combined as (4 D(h/2) - D(h)) / 3.
    Intended purely as a cross-validation oracle for the series route;
    usable for order <= 4 only.
    """
    theta = family.check_theta(theta)
    if not 1 <= order <= 4:
        raise ValueError("the finite-difference oracle supports orders 1..4 only")
    if rule is None:
        rule = family.recommended_rule(theta)
    lo, hi = family.domain
    margin = min(theta - lo, hi - theta)
    h = step if step is not None else 4e-3 * max(1.0, abs(theta))
    if math.isfinite(margin):
        h = min(h, 0.2 * margin)
    if h <= 0 or theta + 2 * h == theta:
        raise ValueError("finite-difference step underflowed")

    def g(eps: float) -> np.ndarray:
        return np.sqrt(family.density(rule.nodes, theta + eps))

    base = g(0.0)

    def stencil(k: int, h: float) -> np.ndarray:
        if k == 1:
            return (g(h) - g(-h)) / (2 * h)
        if k == 2:
            return (g(h) - 2 * base + g(-h)) / h**2
        if k == 3:
            return (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h**3)
        return (g(2 * h) - 4 * g(h) + 6 * base - 4 * g(-h) + g(-2 * h)) / h**4

    rows = [rule.grid(base)]
    for k in range(1, order + 1):
        refined = (4.0 * stencil(k, h / 2) - stencil(k, h)) / 3.0
        rows.append(rule.grid(refined))
    norm_defect = abs(inner_product(rows[0], rows[0]) - 1.0)
    return SqrtJet(
        theta=theta,
        order=order,
        rows=tuple(rows),
        method="finite-difference",
        rule=rule,
        dropped_mass=0.0,
        norm_defect=norm_defect,
    )


# -- estimators ----------------------------------------------------------------


def polynomial_statistic(coefficients: Sequence[float]) -> Callable[[np.ndarray], np.ndarray]:
    coefs = np.asarray([float(c) for c in coefficients])

    def statistic(x: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(x, coefs)

    return statistic


def polynomial_psi(coefficients: Sequence[float]) -> tuple[Callable, Callable]:
    coefs = np.asarray([float(c) for c in coefficients])
    deriv = np.polynomial.polynomial.polyder(coefs) if coefs.size > 1 else np.zeros(1)

    def psi(theta: float) -> float:
        return float(np.polynomial.polynomial.polyval(theta, coefs))

    def psi_prime(theta: float) -> float:
        return float(np.polynomial.polynomial.polyval(theta, deriv))

    return psi, psi_prime


NAMED_PSI: dict[str, tuple[Callable, Callable]] = {
    "identity": (lambda t: t, lambda t: 1.0),
    "square": (lambda t: t * t, lambda t: 2.0 * t),
    "reciprocal": (lambda t: 1.0 / t, lambda t: -1.0 / (t * t)),
}


def canonical_estimator(family: ParametricFamily) -> EstimatorSpec:
    """T(x) = x paired with the functional it is actually unbiased for."""
    if family.name == "exponential-rate":
        psi, psi_prime = NAMED_PSI["reciprocal"]
        return EstimatorSpec("sample-value", lambda x: x, psi, psi_prime)
    psi, psi_prime = NAMED_PSI["identity"]
    return EstimatorSpec("sample-value", lambda x: x, psi, psi_prime)


def check_unbiased(
    estimator: EstimatorSpec,
    family: ParametricFamily,
    theta: float,
    rule: QuadratureRule | None = None,
    tolerance: float = 1e-8,
) -> float:
    """Verify E_theta[T] = psi(theta); returns the defect, raises when too large."""
    theta = family.check_theta(theta)
    if rule is None:
        rule = family.recommended_rule(theta)
    mean = rule.integrate(estimator.statistic(rule.nodes) * family.density(rule.nodes, theta))
    target = estimator.psi(theta)
    defect = abs(mean - target)
    if defect > tolerance * max(1.0, abs(target)):
        raise UnbiasednessError(
            f"estimator {estimator.name!r} is biased for {family.name} at theta={theta}: "
            f"E[T]={mean!r} but psi(theta)={target!r}"
        )
    return defect


# -- tabulated families ---------------------------------------------------------


def load_tabulated(path: str | Path, name: str | None = None) -> ParametricFamily:
    """Read a theta-grid / x-grid / density-matrix text file.

    The matrix holds one row per theta value.  Dependence on theta is
    interpolated with a quintic spline, which supports jets to order 4
    with documented accuracy limits; the x-grid doubles as the support
    of the recommended trapezoid rule.
    """
    path = Path(path)
    theta_grid: np.ndarray | None = None
    x_grid: np.ndarray | None = None
    rows: list[np.ndarray] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("theta-grid:"):
            theta_grid = np.array([float(v) for v in line.split(":", 1)[1].split()])
        elif line.startswith("x-grid:"):
            x_grid = np.array([float(v) for v in line.split(":", 1)[1].split()])
        else:
            rows.append(np.array([float(v) for v in line.split()]))
    if theta_grid is None or x_grid is None:
        raise ValueError(f"{path}: missing theta-grid or x-grid header")
    if theta_grid.size < 6:
        raise ValueError(f"{path}: quintic interpolation needs at least 6 theta values")
    matrix = np.vstack(rows)
    if matrix.shape != (theta_grid.size, x_grid.size):
        raise ValueError(
            f"{path}: density matrix shape {matrix.shape} does not match "
            f"{theta_grid.size} theta values x {x_grid.size} x values"
        )
    if np.any(matrix < 0):
        raise ValueError(f"{path}: densities must be nonnegative")
    spline = make_interp_spline(theta_grid, matrix, k=5, axis=0)
    derivative_splines = [spline] + [spline.derivative(j) for j in range(1, 5)]

    def density_series(x, theta, order):
        if order > 4:
            raise ValueError("tabulated families support jets to order 4 only")
        if not np.array_equal(np.asarray(x, dtype=float), x_grid):
            raise ValueError("tabulated families are defined on their own x-grid only")
        coefs = [derivative_splines[j](theta) / math.factorial(j) for j in range(order + 1)]
        return TaylorSeries(tuple(np.asarray(c) for c in coefs))

    def rule(theta, n: int | None = None):
        return trapezoid(x_grid)

    return ParametricFamily(
        name=name or path.stem,
        domain=(float(theta_grid[0]), float(theta_grid[-1])),
        parameters={"source": str(path)},
        density_series=density_series,
        recommended_rule=rule,
        rule_hint="trapezoid on the tabulated x-grid",
        norm_tolerance=1e-2,
        max_jet_order=4,
    )
