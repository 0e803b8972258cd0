"""Known constraint systems for the two worked examples (4 users and 5 users,
both with 2 leaders and cache parameter 1), plus randomized algebraic
equivalence checks.

Two solved-form systems over the same coefficient set are equivalent iff
they cut out the same variety; for these Laurent-monomial relations that is
checked Schwartz-Zippel style: sample assignments satisfying one system and
evaluate the other, in both directions, over a large prime field.
"""

from __future__ import annotations

from .codec import coefficient_domain
from .field import FieldSpec
from .graph import CoefficientStatus, Monomial


def _mono(sign: int, powers: dict) -> Monomial:
    return Monomial.make(sign, powers)


# 4 users, leaders {1, 2}, t = 1: the single component for {3, 4}.
# Solved forms of the three dotted-edge constraints in the reference tree.
# The (2, {1}) form follows from equating the two paths into bt_{1,2}; note
# the (2,{4})/(4,{2}) orientation, which only matters off unit modulus.
FOUR_USER_FORMS = {
    (3, (1,)): _mono(1, {(1, (3,)): 1, (4, (1,)): 1, (1, (4,)): -1, (3, (4,)): 1, (4, (3,)): -1}),
    (3, (2,)): _mono(1, {(2, (3,)): 1, (4, (2,)): 1, (2, (4,)): -1, (3, (4,)): 1, (4, (3,)): -1}),
    (2, (1,)): _mono(1, {(4, (1,)): 1, (1, (4,)): -1, (2, (4,)): 1, (4, (2,)): -1, (1, (2,)): 1}),
}

# The combined chain relation, written as monomial identities that must
# evaluate to one under any feasible assignment.
FOUR_USER_IDENTITIES = [
    _mono(1, {(4, (3,)): 1, (3, (4,)): -1, (4, (1,)): -1, (1, (4,)): 1, (1, (3,)): -1, (3, (1,)): 1}),
    _mono(1, {(4, (3,)): 1, (3, (4,)): -1, (4, (2,)): -1, (2, (4,)): 1, (2, (3,)): -1, (3, (2,)): 1}),
    _mono(0, {(4, (3,)): 1, (3, (4,)): -1, (2, (3,)): -1, (4, (1,)): -1, (1, (2,)): -1,
              (3, (2,)): 1, (1, (4,)): 1, (2, (1,)): 1}),
]

# 5 users, leaders {1, 2}, t = 1: six constrained coefficients across the
# three components, each with its solved form.
FIVE_USER_FORMS = {
    (4, (3,)): _mono(1, {(4, (1,)): 1, (3, (4,)): 1, (1, (3,)): 1, (3, (1,)): -1, (1, (4,)): -1}),
    (5, (3,)): _mono(1, {(5, (1,)): 1, (3, (5,)): 1, (1, (3,)): 1, (3, (1,)): -1, (1, (5,)): -1}),
    (5, (4,)): _mono(1, {(5, (1,)): 1, (4, (5,)): 1, (1, (4,)): 1, (4, (1,)): -1, (1, (5,)): -1}),
    (2, (3,)): _mono(1, {(2, (1,)): 1, (3, (2,)): 1, (1, (3,)): 1, (3, (1,)): -1, (1, (2,)): -1}),
    (2, (4,)): _mono(1, {(2, (1,)): 1, (4, (2,)): 1, (1, (4,)): 1, (4, (1,)): -1, (1, (2,)): -1}),
    (2, (5,)): _mono(1, {(2, (1,)): 1, (5, (2,)): 1, (1, (5,)): 1, (5, (1,)): -1, (1, (2,)): -1}),
}


def status_forms(status: CoefficientStatus) -> dict:
    """Solved forms extracted by the greedy pass, as target -> monomial."""
    return {cid: rel.rhs for cid, rel in status.constrained.items()}


def assignment_from_forms(forms: dict, all_ids, spec: FieldSpec, rng) -> dict:
    """Random nonzero values on the non-target ids, targets derived.  The
    result satisfies `forms` by construction and is everywhere nonzero."""
    alpha = {}
    for cid in all_ids:
        if cid not in forms:
            alpha[cid] = 1 + rng.randrange(spec.q - 1)
    for target, mono in forms.items():
        alpha[target] = mono.evaluate(spec, alpha)
    return alpha


def forms_hold(forms: dict, alpha: dict, spec: FieldSpec) -> bool:
    return all(alpha[target] == mono.evaluate(spec, alpha) for target, mono in forms.items())


def identities_hold(identities, alpha: dict, spec: FieldSpec) -> bool:
    return all(mono.evaluate(spec, alpha) == 1 for mono in identities)


def equivalence_mismatches(forms_a: dict, forms_b: dict, K: int, t: int,
                           spec: FieldSpec, rng, trials: int = 50,
                           identities=()) -> int:
    """Count trials where the two solved-form systems disagree.

    Each trial samples one assignment per system and cross-evaluates the
    other (plus any extra identities); zero mismatches over many trials is
    the equivalence certificate."""
    all_ids = coefficient_domain(K, t)
    mismatches = 0
    for _ in range(trials):
        asg_a = assignment_from_forms(forms_a, all_ids, spec, rng)
        if not (forms_hold(forms_b, asg_a, spec) and identities_hold(identities, asg_a, spec)):
            mismatches += 1
            continue
        asg_b = assignment_from_forms(forms_b, all_ids, spec, rng)
        if not (forms_hold(forms_a, asg_b, spec) and identities_hold(identities, asg_b, spec)):
            mismatches += 1
    return mismatches
