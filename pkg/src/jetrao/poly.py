"""Exact multivariate polynomial arithmetic over the rationals.

Generators are plain strings; coefficients are ``fractions.Fraction``.
This is the coefficient ring for every symbolic jet-space object, so
equality must be decidable: polynomials are kept in canonical form
(monomials name-sorted, zero coefficients pruned) and two polynomials
are equal iff their canonical forms coincide.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Scalar = Union[int, Fraction]
# ((generator, exponent), ...) sorted by generator name, every exponent >= 1
Monomial = tuple[tuple[str, int], ...]

_ONE: Monomial = ()


def _as_fraction(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"exact coefficient expected (int or Fraction), got {type(value).__name__}")


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict[str, int] = dict(a)
    for name, k in b:
        exps[name] = exps.get(name, 0) + k
    return tuple(sorted(exps.items()))


class Poly:
    """Immutable multivariate polynomial with exact rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        canonical: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coef in terms.items():
                frac = _as_fraction(coef)
                if frac:
                    canonical[tuple(sorted(mono))] = frac
        object.__setattr__(self, "_terms", canonical)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def one(cls) -> "Poly":
        return cls({_ONE: 1})

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        return cls({_ONE: value})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def generators(self) -> frozenset[str]:
        return frozenset(name for mono in self._terms for name, _ in mono)

    def constant_term(self) -> Fraction:
        return self._terms.get(_ONE, Fraction(0))

    def total_degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(k for _, k in mono) for mono in self._terms)

    # -- ring operations ---------------------------------------------------

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return None

    def __add__(self, other) -> "Poly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out = dict(self._terms)
        for mono, coef in rhs._terms.items():
            out[mono] = out.get(mono, Fraction(0)) + coef
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({mono: -coef for mono, coef in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "Poly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other) -> "Poly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for mono_a, coef_a in self._terms.items():
            for mono_b, coef_b in rhs._terms.items():
                mono = _mono_mul(mono_a, mono_b)
                out[mono] = out.get(mono, Fraction(0)) + coef_a * coef_b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial exponent must be a non-negative integer")
        result = Poly.one()
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._terms == rhs._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- calculus ----------------------------------------------------------

    def diff(self, name: str) -> "Poly":
        """Formal partial derivative, all generators treated as independent."""
        out: dict[Monomial, Fraction] = {}
        for mono, coef in self._terms.items():
            exps = dict(mono)
            k = exps.get(name, 0)
            if not k:
                continue
            if k == 1:
                del exps[name]
            else:
                exps[name] = k - 1
            lowered = tuple(sorted(exps.items()))
            out[lowered] = out.get(lowered, Fraction(0)) + coef * k
        return Poly(out)

    def substitute(self, name: str, value: "Poly") -> "Poly":
        """Replace a generator by a polynomial."""
        result = Poly.zero()
        for mono, coef in self._terms.items():
            piece = Poly.const(coef)
            for gen, k in mono:
                factor = value if gen == name else Poly.var(gen)
                piece = piece * factor**k
            result = result + piece
        return result

    def evaluate(self, values: Mapping[str, float]) -> float:
        """Numeric evaluation; every generator must be assigned."""
        total = 0.0
        for mono, coef in self._terms.items():
            term = float(coef)
            for gen, k in mono:
                term *= values[gen] ** k
            total += term
        return total

    # -- rendering ---------------------------------------------------------

    def render(self, names: Mapping[str, str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = names or {}

        def fmt_mono(mono: Monomial) -> str:
            parts = []
            for gen, k in mono:
                shown = names.get(gen, gen)
                parts.append(shown if k == 1 else f"{shown}^{k}")
            return "*".join(parts)

        ordered = sorted(
            self._terms.items(),
            key=lambda item: (-sum(k for _, k in item[0]), item[0]),
        )
        pieces = []
        for mono, coef in ordered:
            body = fmt_mono(mono)
            if not body:
                text = str(coef)
            elif coef == 1:
                text = body
            elif coef == -1:
                text = f"-{body}"
            else:
                text = f"{coef}*{body}"
            pieces.append(text)
        out = pieces[0]
        for piece in pieces[1:]:
            if piece.startswith("-"):
                out += f" - {piece[1:]}"
            else:
                out += f" + {piece}"
        return out

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Poly({self.render()})"


def poly_sum(items: Iterable[Poly]) -> Poly:
    total = Poly.zero()
    for item in items:
        total = total + item
    return total
