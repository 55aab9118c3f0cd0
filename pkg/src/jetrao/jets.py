"""Exact exterior calculus on finite jet coordinates (theta, s0, ..., sm).

Implements contact one-forms, the total derivative field, exterior
derivatives, wedge and interior products, reduction modulo the contact
ideal, the horizontal/vertical splitting of prolonged-section tangents,
and vector fields restricted to an ODE locus.  All coefficients live in
the exact rational ring :class:`jetrao.poly.Poly`, so every identity
check is equality of canonical forms, never tolerance-based.

All objects are immutable values; operations are pure functions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .poly import Poly

THETA = "theta"
DEFAULT_MAX_ORDER = 8

CoeffLike = Union[Poly, int, Fraction]


class ContextMismatchError(ValueError):
    """Two symbolic objects built over different jet contexts were combined."""


class UnknownGeneratorError(ValueError):
    """An expression references a name outside the context's roster and atoms."""


def s_coord(k: int) -> str:
    return f"s{k}"


def _coeff(value: CoeffLike) -> Poly:
    if isinstance(value, Poly):
        return value
    return Poly.const(value)


# -- formal partial symbols for dependent atoms ------------------------------

_PARTIAL_RE = re.compile(r"^∂([A-Za-z_][A-Za-z0-9_]*)/((?:∂(?:theta|s\d+))+)$")


def partial_symbol(base: str, coords: Sequence[str]) -> str:
    """Canonical name of a formal mixed partial of an atom.

    Coordinates are sorted, so mixed partials commute by construction.
    """
    tail = "".join(f"∂{c}" for c in sorted(coords))
    return f"∂{base}/{tail}"


def split_partial(name: str) -> tuple[str, tuple[str, ...]] | None:
    match = _PARTIAL_RE.match(name)
    if not match:
        return None
    coords = tuple(part for part in match.group(2).split("∂") if part)
    return match.group(1), coords


@dataclass(frozen=True)
class JetContext:
    """Finite jet space with coordinates (theta, s0, ..., s_order).

    ``atoms`` maps opaque scalar names to the roster coordinates they are
    declared to depend on; an empty dependence tuple means the atom is a
    formal constant (its derivatives vanish).  Contexts are immutable.
    """

    order: int
    atoms: tuple[tuple[str, tuple[str, ...]], ...] = ()
    max_order: int = DEFAULT_MAX_ORDER

    def __init__(
        self,
        order: int,
        atoms: Mapping[str, Sequence[str]] | Sequence[str] | None = None,
        max_order: int = DEFAULT_MAX_ORDER,
    ):
        if not isinstance(order, int) or order < 0:
            raise ValueError(f"jet order must be a non-negative integer, got {order!r}")
        if order > max_order:
            raise ValueError(f"jet order {order} exceeds configured maximum {max_order}")
        normalized: dict[str, tuple[str, ...]] = {}
        if atoms:
            items = atoms.items() if isinstance(atoms, Mapping) else ((a, ()) for a in atoms)
            for name, deps in items:
                normalized[str(name)] = tuple(deps)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "atoms", tuple(sorted(normalized.items())))
        object.__setattr__(self, "max_order", max_order)
        roster = set(self.coords)
        for name, deps in self.atoms:
            if name in roster:
                raise ValueError(f"atom {name!r} collides with a jet coordinate")
            for dep in deps:
                if dep not in roster:
                    raise ValueError(f"atom {name!r} depends on unknown coordinate {dep!r}")

    @property
    def coords(self) -> tuple[str, ...]:
        return (THETA,) + tuple(s_coord(k) for k in range(self.order + 1))

    @property
    def atom_table(self) -> dict[str, tuple[str, ...]]:
        return dict(self.atoms)

    def index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise UnknownGeneratorError(f"{name!r} is not a coordinate of J^{self.order}") from None

    def with_atom(self, name: str, deps: Sequence[str] = ()) -> "JetContext":
        table = self.atom_table
        table[name] = tuple(deps)
        return JetContext(self.order, table, self.max_order)

    def prolong(self, steps: int = 1) -> "JetContext":
        new_order = self.order + steps
        return JetContext(new_order, self.atom_table, max(self.max_order, new_order))

    def extends(self, other: "JetContext") -> bool:
        """True when this context has at least the other's roster and atoms."""
        return self.order >= other.order and set(other.atoms) <= set(self.atoms)

    # -- generator bookkeeping ----------------------------------------------

    def is_known_generator(self, name: str) -> bool:
        if name in self.coords or name in self.atom_table:
            return True
        parsed = split_partial(name)
        if parsed is None:
            return False
        base, coords = parsed
        return base in self.atom_table and all(c in self.coords for c in coords)

    def validate_expr(self, expr: Poly) -> Poly:
        for gen in expr.generators():
            if not self.is_known_generator(gen):
                raise UnknownGeneratorError(
                    f"{gen!r} is neither a coordinate of J^{self.order} nor a registered atom"
                )
        return expr

    def deps_of(self, name: str) -> tuple[str, ...]:
        if name in self.atom_table:
            return self.atom_table[name]
        parsed = split_partial(name)
        if parsed and parsed[0] in self.atom_table:
            return self.atom_table[parsed[0]]
        raise UnknownGeneratorError(f"{name!r} is not a registered atom")

    def coordinate(self, name: str) -> Poly:
        self.index(name)
        return Poly.var(name)

    def atom(self, name: str) -> Poly:
        if name not in self.atom_table:
            raise UnknownGeneratorError(f"atom {name!r} is not registered in this context")
        return Poly.var(name)

    # -- calculus with the atom chain rule -----------------------------------

    def diff(self, expr: Poly, coord: str) -> Poly:
        """Partial derivative along a roster coordinate.

        Dependent atoms contribute formal partial symbols; independent
        atoms differentiate to zero.
        """
        self.index(coord)
        result = expr.diff(coord)
        for gen in expr.generators():
            if gen in self.coords:
                continue
            parsed = split_partial(gen)
            base = parsed[0] if parsed else gen
            applied = parsed[1] if parsed else ()
            if coord not in self.deps_of(gen):
                continue
            symbol = partial_symbol(base, tuple(applied) + (coord,))
            result = result + expr.diff(gen) * Poly.var(symbol)
        return result


def _require_same_context(a, b) -> JetContext:
    if a.ctx != b.ctx:
        raise ContextMismatchError("operands were built over different jet contexts")
    return a.ctx


_DISPLAY = {THETA: "θ"}


def _show(name: str) -> str:
    return _DISPLAY.get(name, name)


def _join_terms(pieces: list[str]) -> str:
    if not pieces:
        return "0"
    out = pieces[0]
    for piece in pieces[1:]:
        if piece.startswith("-"):
            out += f" - {piece[1:]}"
        else:
            out += f" + {piece}"
    return out


def _term_text(coef: Poly, basis: str) -> str:
    if coef == Poly.one():
        return basis
    if coef == Poly.const(-1):
        return f"-{basis}"
    body = coef.render(_DISPLAY)
    if len(coef.terms) > 1:
        body = f"({body})"
    return f"{body}*{basis}"


@dataclass(frozen=True, eq=False)
class OneForm:
    """A one-form written over the basis covectors {dθ, ds0, ..., ds_m}."""

    ctx: JetContext
    coeffs: Mapping[str, Poly]

    def __post_init__(self):
        canonical: dict[str, Poly] = {}
        for name, raw in self.coeffs.items():
            self.ctx.index(name)
            expr = self.ctx.validate_expr(_coeff(raw))
            if not expr.is_zero:
                canonical[name] = expr
        object.__setattr__(self, "coeffs", canonical)

    def coeff(self, name: str) -> Poly:
        return self.coeffs.get(name, Poly.zero())

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __add__(self, other: "OneForm") -> "OneForm":
        ctx = _require_same_context(self, other)
        merged = dict(self.coeffs)
        for name, expr in other.coeffs.items():
            merged[name] = merged.get(name, Poly.zero()) + expr
        return OneForm(ctx, merged)

    def __neg__(self) -> "OneForm":
        return OneForm(self.ctx, {name: -expr for name, expr in self.coeffs.items()})

    def __sub__(self, other: "OneForm") -> "OneForm":
        return self + (-other)

    def __rmul__(self, scalar: CoeffLike) -> "OneForm":
        factor = _coeff(scalar)
        return OneForm(self.ctx, {name: factor * expr for name, expr in self.coeffs.items()})

    __mul__ = __rmul__

    def __call__(self, field: "VectorField") -> Poly:
        return evaluate_form(self, field)

    def lift(self, ctx_higher: JetContext) -> "OneForm":
        if not ctx_higher.extends(self.ctx):
            raise ContextMismatchError("target context does not extend the form's context")
        return OneForm(ctx_higher, dict(self.coeffs))

    def __str__(self) -> str:
        ordered = sorted(
            self.coeffs.items(),
            key=lambda item: (item[0] == THETA, self.ctx.index(item[0])),
        )
        return _join_terms([_term_text(expr, f"d{_show(name)}") for name, expr in ordered])

    __repr__ = __str__


@dataclass(frozen=True, eq=False)
class TwoForm:
    """A two-form over the oriented basis dθ∧ds_k and ds_j∧ds_k (j < k)."""

    ctx: JetContext
    coeffs: Mapping[tuple[str, str], Poly]

    def __post_init__(self):
        canonical: dict[tuple[str, str], Poly] = {}
        for (a, b), raw in self.coeffs.items():
            ia, ib = self.ctx.index(a), self.ctx.index(b)
            expr = self.ctx.validate_expr(_coeff(raw))
            if expr.is_zero or ia == ib:
                continue
            key, signed = ((a, b), expr) if ia < ib else ((b, a), -expr)
            if key in canonical:
                signed = canonical[key] + signed
                if signed.is_zero:
                    del canonical[key]
                    continue
            canonical[key] = signed
        object.__setattr__(self, "coeffs", canonical)

    def coeff(self, a: str, b: str) -> Poly:
        ia, ib = self.ctx.index(a), self.ctx.index(b)
        if ia == ib:
            return Poly.zero()
        if ia < ib:
            return self.coeffs.get((a, b), Poly.zero())
        return -self.coeffs.get((b, a), Poly.zero())

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoForm):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __add__(self, other: "TwoForm") -> "TwoForm":
        ctx = _require_same_context(self, other)
        merged = dict(self.coeffs)
        for key, expr in other.coeffs.items():
            merged[key] = merged.get(key, Poly.zero()) + expr
        return TwoForm(ctx, merged)

    def __neg__(self) -> "TwoForm":
        return TwoForm(self.ctx, {key: -expr for key, expr in self.coeffs.items()})

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return self + (-other)

    def __rmul__(self, scalar: CoeffLike) -> "TwoForm":
        factor = _coeff(scalar)
        return TwoForm(self.ctx, {key: factor * expr for key, expr in self.coeffs.items()})

    __mul__ = __rmul__

    def lift(self, ctx_higher: JetContext) -> "TwoForm":
        if not ctx_higher.extends(self.ctx):
            raise ContextMismatchError("target context does not extend the form's context")
        return TwoForm(ctx_higher, dict(self.coeffs))

    def __str__(self) -> str:
        ordered = sorted(
            self.coeffs.items(),
            key=lambda item: (self.ctx.index(item[0][0]), self.ctx.index(item[0][1])),
        )
        return _join_terms(
            [_term_text(expr, f"d{_show(a)}∧d{_show(b)}") for (a, b), expr in ordered]
        )

    __repr__ = __str__


@dataclass(frozen=True, eq=False)
class ThreeForm:
    """Only needed to witness d∘d = 0; keys are index-increasing triples."""

    ctx: JetContext
    coeffs: Mapping[tuple[str, str, str], Poly]

    def __post_init__(self):
        canonical: dict[tuple[str, str, str], Poly] = {}
        for key, raw in self.coeffs.items():
            idx = [self.ctx.index(name) for name in key]
            expr = self.ctx.validate_expr(_coeff(raw))
            if expr.is_zero or len(set(idx)) < 3:
                continue
            order = tuple(sorted(range(3), key=lambda i: idx[i]))
            sign = 1 if order in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1
            sorted_key = tuple(key[i] for i in order)
            signed = expr if sign == 1 else -expr
            if sorted_key in canonical:
                signed = canonical[sorted_key] + signed
                if signed.is_zero:
                    del canonical[sorted_key]
                    continue
            canonical[sorted_key] = signed
        object.__setattr__(self, "coeffs", canonical)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, ThreeForm):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs


@dataclass(frozen=True, eq=False)
class VectorField:
    """A vector field written over the basis {∂θ, ∂s0, ..., ∂s_m}."""

    ctx: JetContext
    components: Mapping[str, Poly]

    def __post_init__(self):
        canonical: dict[str, Poly] = {}
        for name, raw in self.components.items():
            self.ctx.index(name)
            expr = self.ctx.validate_expr(_coeff(raw))
            if not expr.is_zero:
                canonical[name] = expr
        object.__setattr__(self, "components", canonical)

    def component(self, name: str) -> Poly:
        return self.components.get(name, Poly.zero())

    @property
    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.ctx == other.ctx and self.components == other.components

    def __add__(self, other: "VectorField") -> "VectorField":
        ctx = _require_same_context(self, other)
        merged = dict(self.components)
        for name, expr in other.components.items():
            merged[name] = merged.get(name, Poly.zero()) + expr
        return VectorField(ctx, merged)

    def __neg__(self) -> "VectorField":
        return VectorField(self.ctx, {name: -expr for name, expr in self.components.items()})

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def __rmul__(self, scalar: CoeffLike) -> "VectorField":
        factor = _coeff(scalar)
        return VectorField(
            self.ctx, {name: factor * expr for name, expr in self.components.items()}
        )

    __mul__ = __rmul__

    def lift(self, ctx_higher: JetContext) -> "VectorField":
        if not ctx_higher.extends(self.ctx):
            raise ContextMismatchError("target context does not extend the field's context")
        return VectorField(ctx_higher, dict(self.components))

    def __str__(self) -> str:
        ordered = sorted(self.components.items(), key=lambda item: self.ctx.index(item[0]))
        return _join_terms([_term_text(expr, f"∂{_show(name)}") for name, expr in ordered])

    __repr__ = __str__


@dataclass(frozen=True, eq=False)
class SplitTangent:
    """Horizontal/vertical decomposition of a prolonged-section tangent."""

    horizontal: VectorField
    vertical: VectorField
    whole: VectorField

    def __post_init__(self):
        ctx = _require_same_context(self.horizontal, self.vertical)
        _require_same_context(self.horizontal, self.whole)
        if self.horizontal + self.vertical != self.whole:
            raise ValueError("split tangent does not recompose: horizontal + vertical != whole")
        top = s_coord(ctx.order)
        if set(self.vertical.components) - {top}:
            raise ValueError(f"vertical component must be supported on ∂{top} only")
        if self.horizontal.component(THETA) != Poly.one():
            raise ValueError("horizontal component must have unit ∂θ coefficient")


@dataclass(frozen=True, eq=False)
class ReductionResult:
    """Outcome of rewriting a two-form modulo the contact ideal.

    ``ideal_part`` is a formal sum of alpha ∧ omega_k pieces; the original
    form equals ``residue`` plus the expansion of those pieces.
    """

    residue: TwoForm
    ideal_part: tuple[tuple[OneForm, int], ...]

    def expand(self) -> TwoForm:
        total = self.residue
        for alpha, k in self.ideal_part:
            total = total + wedge(alpha, contact_form(alpha.ctx, k))
        return total


# -- basis builders -----------------------------------------------------------


def basis_covector(ctx: JetContext, name: str) -> OneForm:
    return OneForm(ctx, {name: Poly.one()})


def basis_vector(ctx: JetContext, name: str) -> VectorField:
    return VectorField(ctx, {name: Poly.one()})


# -- operations ---------------------------------------------------------------


def contact_form(ctx: JetContext, k: int) -> OneForm:
    """The contact one-form ds_k - s_{k+1} dθ, defined for 0 <= k <= order-1."""
    if not 0 <= k <= ctx.order - 1:
        raise IndexError(
            f"contact form index {k} out of range: s{k + 1} is not a coordinate of J^{ctx.order}"
        )
    return OneForm(ctx, {s_coord(k): Poly.one(), THETA: -Poly.var(s_coord(k + 1))})


def total_derivative(ctx: JetContext) -> VectorField:
    """The total derivative field ∂θ + s1 ∂s0 + ... + s_m ∂s_{m-1} on J^m."""
    if ctx.order < 1:
        raise ValueError("total derivative needs jet order >= 1")
    components: dict[str, Poly] = {THETA: Poly.one()}
    for k in range(ctx.order):
        components[s_coord(k)] = Poly.var(s_coord(k + 1))
    return VectorField(ctx, components)


def exterior_derivative(form: OneForm | TwoForm) -> TwoForm | ThreeForm:
    """d of a one-form (two-form result) or of a two-form (three-form result)."""
    ctx = form.ctx
    if isinstance(form, OneForm):
        acc2: dict[tuple[str, str], Poly] = {}
        for b, expr in form.coeffs.items():
            for a in ctx.coords:
                if a == b:
                    continue
                partial = ctx.diff(expr, a)
                if partial.is_zero:
                    continue
                key = (a, b)
                acc2[key] = acc2.get(key, Poly.zero()) + partial
        return TwoForm(ctx, acc2)
    if isinstance(form, TwoForm):
        acc3: dict[tuple[str, str, str], Poly] = {}
        for (a, b), expr in form.coeffs.items():
            for e in ctx.coords:
                if e in (a, b):
                    continue
                partial = ctx.diff(expr, e)
                if partial.is_zero:
                    continue
                key = (e, a, b)
                acc3[key] = acc3.get(key, Poly.zero()) + partial
        return ThreeForm(ctx, acc3)
    raise TypeError(f"cannot take exterior derivative of {type(form).__name__}")


def wedge(alpha: OneForm, beta: OneForm) -> TwoForm:
    """Wedge product of two one-forms (bilinear, antisymmetric)."""
    ctx = _require_same_context(alpha, beta)
    acc: dict[tuple[str, str], Poly] = {}
    for a, ca in alpha.coeffs.items():
        for b, cb in beta.coeffs.items():
            if a == b:
                continue
            key = (a, b)
            acc[key] = acc.get(key, Poly.zero()) + ca * cb
    return TwoForm(ctx, acc)


def interior_product(field: VectorField, form: TwoForm) -> OneForm:
    """Contraction i_Y Ω; satisfies i_Y(α∧β) = α(Y)β − β(Y)α on decomposables."""
    ctx = _require_same_context(field, form)
    acc: dict[str, Poly] = {}
    for (a, b), expr in form.coeffs.items():
        ya, yb = field.component(a), field.component(b)
        if not ya.is_zero:
            acc[b] = acc.get(b, Poly.zero()) + expr * ya
        if not yb.is_zero:
            acc[a] = acc.get(a, Poly.zero()) - expr * yb
    return OneForm(ctx, acc)


def evaluate_form(form: OneForm, field: VectorField) -> Poly:
    """The pairing ω(Y) = Σ_b ω_b Y^b."""
    _require_same_context(form, field)
    total = Poly.zero()
    for name, expr in form.coeffs.items():
        total = total + expr * field.component(name)
    return total


def reduce_mod_contact_ideal(form: TwoForm, ctx_higher: JetContext) -> ReductionResult:
    """Rewrite a two-form with ds_k = ω_k + s_{k+1} dθ for every k below the top order.

    The residue collects the dθ∧ds_top part that no contact form absorbs;
    it is zero exactly when the input lies in the contact ideal of the
    target context.
    """
    try:
        for key, expr in form.coeffs.items():
            for name in key:
                ctx_higher.index(name)
            ctx_higher.validate_expr(expr)
    except UnknownGeneratorError as err:
        raise ValueError(
            f"target context order {ctx_higher.order} is below the highest "
            f"coordinate appearing in the form ({err})"
        ) from None
    lifted = TwoForm(ctx_higher, dict(form.coeffs))
    top = ctx_higher.order
    residue: dict[tuple[str, str], Poly] = {}
    ideal: list[tuple[OneForm, int]] = []

    def absorb_theta_pair(expr: Poly, k: int):
        # c * dθ∧ds_k
        if k <= top - 1:
            ideal.append((OneForm(ctx_higher, {THETA: expr}), k))
        else:
            key = (THETA, s_coord(top))
            residue[key] = residue.get(key, Poly.zero()) + expr

    for (a, b), expr in lifted.coeffs.items():
        if a == THETA:
            absorb_theta_pair(expr, ctx_higher.index(b) - 1)
            continue
        j = ctx_higher.index(a) - 1
        k = ctx_higher.index(b) - 1
        # ds_j∧ds_k = ω_j∧ds_k + s_{j+1} dθ∧ds_k  with  ω_j∧ds_k = -ds_k∧ω_j
        ideal.append((OneForm(ctx_higher, {s_coord(k): -expr}), j))
        absorb_theta_pair(expr * Poly.var(s_coord(j + 1)), k)

    result = ReductionResult(TwoForm(ctx_higher, residue), tuple(ideal))
    if result.expand() != lifted:
        raise AssertionError("contact-ideal reduction failed its re-expansion check")
    return result


def prolonged_tangent(ctx: JetContext, sigma_next: str) -> SplitTangent:
    """Tangent of a prolonged section: total derivative plus the top vertical term.

    ``sigma_next`` must be a registered atom standing for the next
    derivative value of the underlying section.
    """
    vertical = VectorField(ctx, {s_coord(ctx.order): ctx.atom(sigma_next)})
    horizontal = total_derivative(ctx)
    return SplitTangent(horizontal=horizontal, vertical=vertical, whole=horizontal + vertical)


def torsion_form(m: int, atoms: Mapping[str, Sequence[str]] | None = None) -> OneForm:
    """Contract the structural curvature dω_{m-1} with the total derivative.

    Built on the order m+1 context; the result is asserted to equal the
    next contact form ω_m exactly.
    """
    if m < 1:
        raise ValueError("torsion form needs order m >= 1")
    ctx = JetContext(m + 1, atoms, max_order=max(DEFAULT_MAX_ORDER, m + 1))
    curvature = exterior_derivative(contact_form(ctx, m - 1))
    result = interior_product(total_derivative(ctx), curvature)
    if result != contact_form(ctx, m):
        raise AssertionError("torsion form does not equal the next contact form")
    return result


def ode_vector_field(ctx: JetContext, rhs: CoeffLike | str) -> VectorField:
    """Total derivative restricted to the locus s_{m+1} = rhs on J^{m+1}.

    ``rhs`` may reference (theta, s0, ..., s_m) only.  The returned field
    annihilates the contact forms below order m and ds_m - rhs dθ; both
    facts are asserted exactly before returning.
    """
    if ctx.order < 1:
        raise ValueError("ODE vector field needs a context of order m+1 >= 1")
    m = ctx.order - 1
    top = s_coord(ctx.order)
    if isinstance(rhs, str):
        if top in ctx.deps_of(rhs):
            raise ValueError(f"right-hand side atom {rhs!r} must not depend on {top}")
        rhs_expr = ctx.atom(rhs)
    else:
        rhs_expr = ctx.validate_expr(_coeff(rhs))
        if top in rhs_expr.generators():
            raise ValueError(f"right-hand side must not reference {top}")
        for gen in rhs_expr.generators():
            if gen not in ctx.coords and top in ctx.deps_of(gen):
                raise ValueError(f"right-hand side atom {gen!r} must not depend on {top}")
    components: dict[str, Poly] = {THETA: Poly.one()}
    for k in range(m):
        components[s_coord(k)] = Poly.var(s_coord(k + 1))
    components[s_coord(m)] = rhs_expr
    field = VectorField(ctx, components)

    for k in range(m):
        if not evaluate_form(contact_form(ctx, k), field).is_zero:
            raise AssertionError("ODE field fails to annihilate a lower contact form")
    constraint = OneForm(ctx, {s_coord(m): Poly.one(), THETA: -rhs_expr})
    if not evaluate_form(constraint, field).is_zero:
        raise AssertionError("ODE field fails to annihilate its constraint form")
    return field


def project_jet(point: Sequence[float], k: int) -> tuple[float, ...]:
    """Forget derivatives above order k in a jet point (theta, s0, ..., s_m)."""
    if len(point) < 2:
        raise ValueError("a jet point needs at least (theta, s0)")
    m = len(point) - 2
    if not 0 <= k <= m:
        raise ValueError(f"projection order {k} out of range 0..{m}")
    return tuple(point[: k + 2])
