"""Brute force counterparts of the main algorithms.

Used by the test suite and the `fixtures` subcommand. Nothing here relies on
the length formula, descents, normal forms or the reduction engine: lengths
are counted inversions and words are found by stripping generators while the
counted length drops. Normal forms only name elements in the output.
"""

from __future__ import annotations

import logging
from collections import deque
from itertools import combinations, product
from typing import Any

from weylstrata.elements import ExtAffElt, FinWeylElt
from weylstrata.hecke import PARAM_RING, Q, HeckeAlgebra, HeckeElt, ParamPoly, format_poly
from weylstrata.twist import Twist
from weylstrata.weyl import ExtendedAffineWeylGroup

_logger = logging.getLogger(__name__)


def _inverted(group: ExtendedAffineWeylGroup, element: ExtAffElt, level_bound: int) -> int:
    datum = group.datum
    inverse_matrix = element.finite.inverse_matrix
    count = 0
    for root, functional in enumerate(datum.functionals):
        # w(α, k) = (uα, k - ⟨λ, uα⟩); uα is the functional f_α·u⁻¹
        image = tuple(
            sum(functional[k] * inverse_matrix[k][j] for k in range(datum.dimension))
            for j in range(datum.dimension)
        )
        image_root = datum.root_index[image]
        shift = sum(a * b for a, b in zip(element.translation, image))
        image_positive = all(c >= 0 for c in datum.roots[image_root])
        for level in range(level_bound + 1):
            positive = level > 0 or all(c >= 0 for c in datum.roots[root])
            new_level = level - shift
            image_negative = new_level < 0 or (new_level == 0 and not image_positive)
            if positive and image_negative:
                count += 1
    return count


def oracle_length(group: ExtendedAffineWeylGroup, element: ExtAffElt) -> int:
    """Number of positive affine roots sent to negative ones."""
    datum = group.datum
    level_bound = 1 + max(
        (abs(datum.pair(element.translation, r)) for r in range(len(datum.roots))),
        default=0,
    )
    count = _inverted(group, element, level_bound)
    # one more level must not find anything new
    assert _inverted(group, element, level_bound + 1) == count
    return count


def oracle_word(
    group: ExtendedAffineWeylGroup, element: ExtAffElt
) -> tuple[list[int], ExtAffElt]:
    """Word ``i₁ … i_k`` and length zero ``τ`` with ``element = s_{i₁}···s_{i_k}·τ``."""
    word: list[int] = []
    current, length = element, oracle_length(group, element)
    while length:
        for i in group.affine_indices:
            shorter = group.simple_reflection(i) * current
            shorter_length = oracle_length(group, shorter)
            if shorter_length < length:
                break
        else:
            raise AssertionError(f"no simple reflection shortens {group.format(current)}")
        word.append(i)
        current, length = shorter, shorter_length
    return word, current


def oracle_omega(group: ExtendedAffineWeylGroup) -> list[ExtAffElt]:
    """Length zero elements of the torsion classes of Omega."""
    quotient = group.omega.quotient
    return [
        oracle_word(group, group.translation(quotient.lift(coords)))[1]
        for coords in quotient.torsion_elements()
    ]


def finite_order(group: ExtendedAffineWeylGroup) -> int:
    """Order of the finite Weyl group, by closing its simple reflections."""
    generators = [group.simple_reflection(i).finite for i in group.affine_indices if i]
    identity = FinWeylElt.identity(group.dimension)
    seen = {identity}
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for generator in generators:
            image = current * generator
            if image not in seen:
                seen.add(image)
                queue.append(image)
    return len(seen)


def words(group: ExtendedAffineWeylGroup, max_length: int) -> list[ExtAffElt]:
    """Distinct products of at most `max_length` simple affine reflections."""
    generators = [group.simple_reflection(i) for i in group.affine_indices]
    seen = {group.identity}
    for size in range(1, max_length + 1):
        for letters in product(generators, repeat=size):
            element = group.identity
            for letter in letters:
                element = element * letter
            seen.add(element)
    return list(seen)


def oracle_ball(group: ExtendedAffineWeylGroup, radius: int) -> list[ExtAffElt]:
    """Elements of length at most `radius` in the torsion cosets of Omega."""
    return list({w * tau for w in words(group, radius) for tau in oracle_omega(group)})


def oracle_class_ball(twist: Twist, element: ExtAffElt, depth: int) -> set[ExtAffElt]:
    """``{x·w·θ(x)⁻¹}`` for ``x`` over words of length ≤ `depth` times torsion Omega."""
    group = twist.group
    conjugators = [word * tau for word in words(group, depth) for tau in oracle_omega(group)]
    return {x * element * twist.apply(x).inverse() for x in conjugators}


def oracle_straight(twist: Twist, element: ExtAffElt, kmax: int) -> bool:
    """Check ``ℓ((wθ)^k) = k·ℓ(w)`` for ``k = 1 … kmax`` directly."""
    group = twist.group
    length = oracle_length(group, element)
    power = group.identity
    for k in range(1, kmax + 1):
        # (wθ)^k = w θ(w) ··· θ^{k-1}(w) θ^k
        power = power * twist.apply_power(element, k - 1)
        if oracle_length(group, power) != k * length:
            return False
    return True


def oracle_hecke_mul(algebra: HeckeAlgebra, first: HeckeElt, second: HeckeElt) -> HeckeElt:
    """Product computed generator by generator from the left."""
    group = algebra.group
    result: dict[ExtAffElt, ParamPoly] = {}
    for left, left_coeff in first.terms.items():
        word, omega_part = oracle_word(group, left)
        partial = {omega_part * element: coeff for element, coeff in second.terms.items()}
        for i in reversed(word):
            generator = group.simple_reflection(i)
            step: dict[ExtAffElt, ParamPoly] = {}
            for element, coeff in partial.items():
                moved = generator * element
                if oracle_length(group, moved) > oracle_length(group, element):
                    step[moved] = step.get(moved, PARAM_RING.zero) + coeff
                else:
                    step[element] = step.get(element, PARAM_RING.zero) + coeff * (Q - 1)
                    step[moved] = step.get(moved, PARAM_RING.zero) + coeff * Q
            partial = step
        for element, coeff in partial.items():
            result[element] = result.get(element, PARAM_RING.zero) + coeff * left_coeff
    return HeckeElt({k: v for k, v in result.items() if v})


def oracle_double_coset_reps(
    group: ExtendedAffineWeylGroup,
    left: tuple[int, ...],
    right: tuple[int, ...],
    elements: list[ExtAffElt],
) -> list[ExtAffElt]:
    """Members of `elements` lengthened by ``s_i`` on the left and ``s_j`` on the right.

    ``i`` runs over `left` and ``j`` over `right`.
    """
    reps = []
    for element in elements:
        length = oracle_length(group, element)
        if all(
            oracle_length(group, group.simple_reflection(i) * element) > length for i in left
        ) and all(
            oracle_length(group, element * group.simple_reflection(j)) > length for j in right
        ):
            reps.append(element)
    return reps


def generate_fixtures(twist: Twist, radius: int, depth: int = 2) -> dict[str, Any]:
    """Golden data for the identity and torsion coset balls up to `radius`.

    Returns:
        A JSON serializable mapping with per-element oracle data, the products
        of all basis pairs of total length at most `radius` and the minimal
        double coset representatives in the ball for every pair of proper
        subsets of the simple affine reflections.
    """
    group = twist.group
    algebra = HeckeAlgebra(group)
    kmax = twist.order * finite_order(group)
    ball = group.sorted(oracle_ball(group, radius))
    lengths = {element: oracle_length(group, element) for element in ball}

    elements = []
    for element in ball:
        conjugates = oracle_class_ball(twist, element, depth)
        shortest = min(oracle_length(group, c) for c in conjugates)
        elements.append(
            {
                "element": group.format(element),
                "length": lengths[element],
                "straight": oracle_straight(twist, element, kmax),
                "class_minimal": [
                    group.format(c)
                    for c in group.sorted(
                        c for c in conjugates if oracle_length(group, c) == shortest
                    )
                ],
            }
        )

    products = []
    for x in ball:
        for y in ball:
            if lengths[x] + lengths[y] > radius:
                continue
            result = oracle_hecke_mul(algebra, algebra.basis(x), algebra.basis(y))
            products.append(
                {
                    "left": group.format(x),
                    "right": group.format(y),
                    "product": [
                        [group.format(k), format_poly(result.terms[k])]
                        for k in group.sorted(result.terms)
                    ],
                }
            )

    indices = list(group.affine_indices)
    subsets = [s for size in range(len(indices)) for s in combinations(indices, size)]
    double_cosets = [
        {
            "left": list(left),
            "right": list(right),
            "reps": [
                group.format(e) for e in oracle_double_coset_reps(group, left, right, ball)
            ],
        }
        for left in subsets
        for right in subsets
    ]
    _logger.debug(
        "generated fixtures for %s elements, %s products and %s double coset lists",
        len(elements),
        len(products),
        len(double_cosets),
    )
    return {
        "radius": radius,
        "elements": elements,
        "products": products,
        "double_cosets": double_cosets,
    }
