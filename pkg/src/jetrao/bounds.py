"""Gram systems over jet spans and the variance bound ladder.

The residual of an estimator is embedded as e = (T - psi(theta)) * sqrt(f);
projecting it onto the span of the first m derivative rows of sqrt(f)
yields a non-decreasing ladder of variance lower bounds.  The smallest m
whose projection exhausts the residual (in both L2 and sup norm) is the
detected efficiency order; the solved coefficients are then the
coefficients of the linear differential relation the square-root map
satisfies at that order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .families import EstimatorSpec, SqrtJet, UnbiasednessError
from .measures import GridFunction, inner_product

#: relative condition threshold beyond which the plain Cholesky route is abandoned
CONDITION_LIMIT = 1e12

#: eigenvalues below this fraction of the largest are treated as zero
SPECTRAL_CUTOFF = 1e-12

#: default relative tolerance for efficiency detection
EFFICIENCY_TOL = 1e-8


class GramSingularError(ValueError):
    """The jet directions are linearly dependent at this theta."""

    def __init__(self, order: int, eigenvalues: np.ndarray):
        self.order = order
        self.eigenvalues = eigenvalues
        super().__init__(
            f"Gram matrix of the first {order} jet rows is numerically singular "
            f"(eigenvalues {eigenvalues})"
        )


@dataclass(frozen=True, eq=False)
class GramSystem:
    """Solved normal equations of the projection onto span{row 1..row m}."""

    order: int
    matrix: np.ndarray
    moments: np.ndarray
    coefficients: np.ndarray
    condition: float
    factorization: str
    rank: int
    degenerate: bool


@dataclass(frozen=True)
class LadderEntry:
    order: int
    bound: float
    residual: float
    coefficients: tuple[float, ...]
    sup_residual: float
    pythagoras_defect: float
    next_row_normal_norm: float | None
    degenerate: bool


@dataclass(frozen=True, eq=False)
class BoundReport:
    theta: float
    estimator: str
    variance: float
    entries: tuple[LadderEntry, ...]
    efficiency_order: int | None
    tolerance: float
    rule_kind: str
    node_count: int
    support: tuple
    dropped_mass: float
    norm_defect: float


@dataclass(frozen=True)
class EfficiencyCertificate:
    order: int
    attained: bool
    residual: float
    sup_residual: float
    coefficients: tuple[float, ...]


def residual(estimator: EstimatorSpec, jet: SqrtJet, tolerance: float = 1e-8) -> GridFunction:
    """Embed the estimator error as (T - psi(theta)) * sqrt(density).

    The embedded error must be orthogonal to the zeroth row (that is the
    unbiasedness statement inside the Hilbert space); a violation raises.
    """
    rule = jet.rule
    values = (estimator.statistic(rule.nodes) - estimator.psi(jet.theta)) * jet.row(0).values
    error = rule.grid(values)
    defect = inner_product(error, jet.row(0))
    scale = max(1.0, float(np.sqrt(inner_product(error, error))))
    if abs(defect) > tolerance * scale:
        raise UnbiasednessError(
            f"estimator {estimator.name!r} at theta={jet.theta}: embedded error has "
            f"component {defect!r} along sqrt(density); it is not unbiased for psi"
        )
    return error


def _inner_matrix(jet: SqrtJet, m: int, error: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    matrix = np.empty((m, m))
    moments = np.empty(m)
    for i in range(1, m + 1):
        moments[i - 1] = inner_product(error, jet.row(i))
        for j in range(i, m + 1):
            value = inner_product(jet.row(i), jet.row(j))
            matrix[i - 1, j - 1] = value
            matrix[j - 1, i - 1] = value
    return matrix, moments


def gram(jet: SqrtJet, m: int, error: GridFunction, degenerate_ok: bool = False) -> GramSystem:
    """Assemble and solve G c = b for the order-m jet span.

    Uses a Cholesky factorization while the matrix is comfortably
    positive definite; beyond the condition limit the solve switches to
    an eigendecomposition with a spectral cutoff.  Rank deficiency under
    the cutoff raises :class:`GramSingularError` unless ``degenerate_ok``
    is set, in which case the cutoff pseudo-inverse solution is returned
    and flagged.
    """
    if not 1 <= m <= jet.order:
        raise ValueError(f"span order {m} outside 1..{jet.order}")
    matrix, moments = _inner_matrix(jet, m, error)
    eigenvalues = linalg.eigvalsh(matrix)
    top = float(eigenvalues[-1])
    if top <= 0.0:
        raise GramSingularError(m, eigenvalues)
    if eigenvalues[0] < -1e-10 * top:
        raise ValueError(f"Gram matrix is not positive semidefinite: {eigenvalues}")
    condition = np.inf if eigenvalues[0] <= 0 else top / float(eigenvalues[0])
    if condition <= CONDITION_LIMIT:
        factor = linalg.cho_factor(matrix)
        coefficients = linalg.cho_solve(factor, moments)
        return GramSystem(m, matrix, moments, coefficients, condition, "cholesky", m, False)
    values, vectors = linalg.eigh(matrix)
    keep = values >= SPECTRAL_CUTOFF * top
    rank = int(np.count_nonzero(keep))
    if rank < m and not degenerate_ok:
        raise GramSingularError(m, values)
    inverse = np.where(keep, 1.0 / np.where(keep, values, 1.0), 0.0)
    coefficients = vectors @ (inverse * (vectors.T @ moments))
    return GramSystem(m, matrix, moments, coefficients, condition, "spectral-cutoff", rank, True)


def ode_coefficients(system: GramSystem) -> tuple[float, ...]:
    """Coefficients of the detected linear differential relation."""
    return tuple(float(c) for c in system.coefficients)


def _projection_stats(
    jet: SqrtJet, error: GridFunction, system: GramSystem
) -> tuple[float, float, float]:
    bound = float(system.moments @ system.coefficients)
    fitted = np.zeros_like(error.values)
    for k in range(1, system.order + 1):
        fitted = fitted + system.coefficients[k - 1] * jet.row(k).values
    gap = error.values - fitted
    gap_fn = jet.rule.grid(gap)
    return bound, float(inner_product(gap_fn, gap_fn)), float(np.max(np.abs(gap)))


def _attained(rho: float, sup_gap: float, variance: float, tolerance: float) -> bool:
    # both the L2 residual and the pointwise gap must vanish relative to ||e||
    return rho <= tolerance * variance and sup_gap <= np.sqrt(tolerance * variance)


def efficiency_certificate(
    jet: SqrtJet,
    error: GridFunction,
    m: int,
    tolerance: float = EFFICIENCY_TOL,
    degenerate_ok: bool = False,
) -> EfficiencyCertificate:
    """Decide order-m efficiency: both the L2 residual and the pointwise
    sup-norm of e - sum(c_k row_k) must vanish at the relative tolerance."""
    system = gram(jet, m, error, degenerate_ok=degenerate_ok)
    variance = inner_product(error, error)
    bound, _, sup_gap = _projection_stats(jet, error, system)
    rho = variance - bound
    attained = _attained(rho, sup_gap, variance, tolerance)
    return EfficiencyCertificate(
        order=m,
        attained=bool(attained),
        residual=rho,
        sup_residual=sup_gap,
        coefficients=ode_coefficients(system),
    )


def bound_ladder(
    jet: SqrtJet,
    error: GridFunction,
    max_order: int,
    estimator_name: str = "",
    tolerance: float = EFFICIENCY_TOL,
    degenerate_ok: bool = False,
) -> BoundReport:
    """Compute bounds for spans m = 1..max_order and detect the efficiency order.

    The report also carries, per order, the norm of the next jet row's
    component normal to the current span (the direction any curvature
    correction would act along) whenever the jet holds that row.
    """
    if max_order < 1:
        raise ValueError("ladder needs max order >= 1")
    if max_order > jet.order:
        raise ValueError(
            f"ladder order {max_order} exceeds the jet order {jet.order}"
        )
    variance = inner_product(error, error)
    entries: list[LadderEntry] = []
    efficiency_order: int | None = None
    previous_bound = 0.0
    for m in range(1, max_order + 1):
        system = gram(jet, m, error, degenerate_ok=degenerate_ok)
        bound, gap_norm_sq, sup_gap = _projection_stats(jet, error, system)
        rho = variance - bound
        pythagoras_defect = abs(rho - gap_norm_sq)
        slack = 1e-10 * max(variance, 1e-300)
        if bound + slack < previous_bound or bound > variance + 1e-8 * max(variance, 1e-300):
            raise ValueError(
                f"ladder monotonicity violated at order {m}: "
                f"bounds {previous_bound!r} -> {bound!r}, variance {variance!r}"
            )
        previous_bound = max(previous_bound, bound)
        next_norm = None
        if m + 1 <= jet.order:
            cross = np.array(
                [inner_product(jet.row(i), jet.row(m + 1)) for i in range(1, m + 1)]
            )
            solved = _solve_for(system, cross)
            norm_sq = inner_product(jet.row(m + 1), jet.row(m + 1)) - float(cross @ solved)
            next_norm = float(np.sqrt(max(norm_sq, 0.0)))
        attained = _attained(rho, sup_gap, variance, tolerance)
        if attained and efficiency_order is None:
            efficiency_order = m
        entries.append(
            LadderEntry(
                order=m,
                bound=bound,
                residual=rho,
                coefficients=ode_coefficients(system),
                sup_residual=sup_gap,
                pythagoras_defect=pythagoras_defect,
                next_row_normal_norm=next_norm,
                degenerate=system.degenerate,
            )
        )
    return BoundReport(
        theta=jet.theta,
        estimator=estimator_name,
        variance=variance,
        entries=tuple(entries),
        efficiency_order=efficiency_order,
        tolerance=tolerance,
        rule_kind=jet.rule.kind,
        node_count=jet.rule.n,
        support=jet.rule.support,
        dropped_mass=jet.dropped_mass,
        norm_defect=jet.norm_defect,
    )


def _solve_for(system: GramSystem, rhs: np.ndarray) -> np.ndarray:
    if system.factorization == "cholesky":
        return linalg.cho_solve(linalg.cho_factor(system.matrix), rhs)
    values, vectors = linalg.eigh(system.matrix)
    keep = values >= SPECTRAL_CUTOFF * float(values[-1])
    inverse = np.where(keep, 1.0 / np.where(keep, values, 1.0), 0.0)
    return vectors @ (inverse * (vectors.T @ rhs))
