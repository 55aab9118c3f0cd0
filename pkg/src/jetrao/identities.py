"""Exact identity suite for the jet-space calculus.

Every check below is an equality of canonical symbolic forms, run for
each order m up to a requested maximum.  The CLI's ``jet-check`` command
renders the results; the acceptance tests require all of them to pass
with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .jets import (
    THETA,
    JetContext,
    OneForm,
    TwoForm,
    contact_form,
    evaluate_form,
    exterior_derivative,
    ode_vector_field,
    prolonged_tangent,
    reduce_mod_contact_ideal,
    s_coord,
    torsion_form,
    total_derivative,
)
from .poly import Poly


@dataclass(frozen=True)
class IdentityResult:
    order: int
    name: str
    passed: bool
    witness: str

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "name": self.name,
            "passed": self.passed,
            "witness": self.witness,
        }


def _check_order(m: int) -> list[IdentityResult]:
    results: list[IdentityResult] = []
    ctx = JetContext(m, max_order=max(8, m + 1))
    ctx_up = JetContext(
        m + 1,
        {"g": (THETA,) + tuple(s_coord(k) for k in range(m + 1)), "sigma": ()},
        max_order=max(8, m + 1),
    )

    field = total_derivative(ctx)
    pairings = [evaluate_form(contact_form(ctx, k), field) for k in range(m)]
    results.append(
        IdentityResult(
            m,
            "contact-forms-annihilate-total-derivative",
            all(p.is_zero for p in pairings),
            f"ω_k({field}) = 0 for k = 0..{m - 1}",
        )
    )

    top_form = contact_form(ctx, m - 1)
    curvature = exterior_derivative(top_form)
    expected = TwoForm(ctx, {(THETA, s_coord(m)): Poly.one()})
    results.append(
        IdentityResult(
            m,
            "structural-curvature-of-top-contact-form",
            curvature == expected,
            f"d({top_form}) = {curvature}",
        )
    )

    same_order = reduce_mod_contact_ideal(curvature, ctx)
    results.append(
        IdentityResult(
            m,
            "curvature-residue-survives-at-same-order",
            not same_order.residue.is_zero,
            f"residue on J^{m}: {same_order.residue}",
        )
    )
    prolonged = reduce_mod_contact_ideal(curvature, ctx_up)
    results.append(
        IdentityResult(
            m,
            "curvature-absorbed-after-prolongation",
            prolonged.residue.is_zero and len(prolonged.ideal_part) > 0,
            f"residue on J^{m + 1}: {prolonged.residue}; "
            f"ideal part has {len(prolonged.ideal_part)} wedge term(s)",
        )
    )

    torsion = torsion_form(m, atoms=dict(ctx_up.atoms))
    results.append(
        IdentityResult(
            m,
            "torsion-equals-next-contact-form",
            torsion == contact_form(torsion.ctx, m),
            f"i_D d(ω_{m - 1}) = {torsion}",
        )
    )

    tangent = prolonged_tangent(torsion.ctx, "sigma")
    torsion_on_tangent = evaluate_form(torsion, tangent.whole)
    results.append(
        IdentityResult(
            m,
            "torsion-vanishes-on-prolonged-tangent",
            torsion_on_tangent.is_zero,
            f"({torsion})({tangent.whole}) = {torsion_on_tangent}",
        )
    )

    ode_field = ode_vector_field(ctx_up, "g")
    constraint = OneForm(
        ctx_up, {s_coord(m): Poly.one(), THETA: -ctx_up.atom("g")}
    )
    annihilated = all(
        evaluate_form(contact_form(ctx_up, k), ode_field).is_zero for k in range(m)
    ) and evaluate_form(constraint, ode_field).is_zero
    results.append(
        IdentityResult(
            m,
            "ode-field-annihilates-constraint-forms",
            annihilated,
            f"Y = {ode_field} kills ω_0..ω_{m - 1} and {constraint}",
        )
    )

    defect = ode_field - total_derivative(ctx_up)
    expected_defect = ctx_up.atom("g") - Poly.var(s_coord(m + 1))
    results.append(
        IdentityResult(
            m,
            "ode-field-vertical-defect",
            defect.components == {s_coord(m): expected_defect},
            f"Y - D = ({defect.component(s_coord(m))})*∂{s_coord(m)}",
        )
    )
    return results


def identity_suite(max_order: int) -> list[IdentityResult]:
    """Run every identity for m = 1..max_order."""
    if not 1 <= max_order <= 8:
        raise ValueError("max order must lie in 1..8")
    results: list[IdentityResult] = []
    for m in range(1, max_order + 1):
        results.extend(_check_order(m))
    return results
