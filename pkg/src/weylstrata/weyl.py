"""Arithmetic in the extended affine Weyl group ``W̃ = Λ ⋊ W₀ = W_a ⋊ Ω``.

Simple affine reflections are ``s1 … sr`` for the finite simple roots and
``s0 = t^{θ∨} s_θ`` for the highest root θ. An element is written in normal
form as a reduced word over these followed by the length zero representative
of its Ω-coset.
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Iterable, Mapping, Sequence

from weylstrata.elements import ExtAffElt, FinWeylElt, MismatchedDatumError, NormalForm
from weylstrata.root_datum import (
    GENERATOR_PATTERN,
    AffineRoot,
    OmegaGroup,
    RootDatum,
    omega_group,
)
from weylstrata.types import IndexSet, OmegaCoords, Side, WeylStrataError

__all__ = [
    "BoundError",
    "ExtendedAffineWeylGroup",
    "MismatchedDatumError",
    "PositiveLengthError",
    "UnknownTokenError",
]

_logger = logging.getLogger(__name__)


class UnknownTokenError(WeylStrataError):
    """A word contains a token that is neither a generator nor an Omega label."""

    module = "weyl"

    def __init__(self, token: str) -> None:
        """Init.

        Args:
            token: The unknown token.
        """
        self.token = token
        super().__init__(f"unknown token {token!r}")


class BoundError(WeylStrataError):
    """A length bound is negative."""

    module = "weyl"

    def __init__(self, bound: int) -> None:
        """Init.

        Args:
            bound: The rejected bound.
        """
        self.bound = bound
        super().__init__(f"length bound must be non-negative, got {bound}")


class PositiveLengthError(WeylStrataError):
    """An element expected in Omega has positive length."""

    module = "weyl"

    def __init__(self, text: str, length: int) -> None:
        """Init.

        Args:
            text: Normal form of the element.
            length: Its length.
        """
        self.text = text
        self.length = length
        super().__init__(f"{text} has length {length}, expected an element of Omega")


class ExtendedAffineWeylGroup:
    """The extended affine Weyl group of a root datum.

    Lengths, normal forms and canonical Omega representatives are memoized
    per instance; elements are plain values and can be shared freely.
    """

    def __init__(
        self, datum: RootDatum, omega_labels: Mapping[str, Sequence[int]] | None = None
    ) -> None:
        """Init.

        Args:
            datum: The root datum.
            omega_labels: Declared Omega labels, name to lattice vector.
        """
        self.datum = datum
        self.omega: OmegaGroup = omega_group(datum, omega_labels)
        self.identity = ExtAffElt.identity(datum.dimension)
        self._generators = tuple(self._make_generator(i) for i in self.affine_indices)
        self._lengths: dict[ExtAffElt, int] = {}
        self._normal_forms: dict[ExtAffElt, NormalForm] = {}
        self._omega_reps: dict[OmegaCoords, ExtAffElt] = {}

    @property
    def dimension(self) -> int:
        """Rank of Λ."""
        return self.datum.dimension

    @property
    def affine_indices(self) -> range:
        """Indices of the simple affine reflections, ``0 … r``; empty in rank 0."""
        return range(self.datum.rank + 1) if self.datum.rank else range(0)

    def affine_simple_root(self, i: int) -> AffineRoot:
        """The simple affine root ``a_i``."""
        if i == 0:
            assert self.datum.highest_root is not None
            return AffineRoot(self.datum.negation[self.datum.highest_root], 1)
        return AffineRoot(self.datum.simple[i - 1], 0)

    def _make_generator(self, i: int) -> ExtAffElt:
        if i == 0:
            highest = self.datum.highest_root
            assert highest is not None
            return ExtAffElt(self.datum.coroots[highest], self.datum.reflection(highest))
        return ExtAffElt(
            (0,) * self.dimension, self.datum.simple_reflection(i - 1)
        )

    def simple_reflection(self, i: int) -> ExtAffElt:
        """The simple affine reflection ``s_i``."""
        return self._generators[i]

    def affine_reflection(self, root: AffineRoot) -> ExtAffElt:
        """Reflection in the zero set of an affine root."""
        coroot = self.datum.coroots[root.root_index]
        return ExtAffElt(
            tuple(-root.level * c for c in coroot),
            self.datum.reflection(root.root_index),
        )

    def translation(self, vector: Sequence[int]) -> ExtAffElt:
        """Return ``t^vector``."""
        if len(vector) != self.dimension:
            raise MismatchedDatumError(self.dimension, len(vector))
        return ExtAffElt.pure_translation(vector)

    def mul(self, first: ExtAffElt, second: ExtAffElt) -> ExtAffElt:
        """Product in W̃.

        Raises:
            MismatchedDatumError: an operand does not live on this lattice.
        """
        self._check(first)
        self._check(second)
        return first * second

    def inv(self, element: ExtAffElt) -> ExtAffElt:
        """Inverse in W̃."""
        self._check(element)
        return element.inverse()

    def _check(self, element: ExtAffElt) -> None:
        if element.dimension != self.dimension:
            raise MismatchedDatumError(self.dimension, element.dimension)

    def _root_under(self, finite: FinWeylElt, root: int, *, inverse: bool) -> int:
        """Index of ``u⁻¹α`` (inverse) or ``uα``."""
        matrix = finite.matrix if inverse else finite.inverse_matrix
        functional = self.datum.functionals[root]
        image = tuple(
            sum(functional[k] * matrix[k][j] for k in range(self.dimension))
            for j in range(self.dimension)
        )
        return self.datum.root_index[image]

    def apply(self, element: ExtAffElt, root: AffineRoot) -> AffineRoot:
        """Return ``w(α, k) = (uα, k - ⟨λ, uα⟩)``."""
        image = self._root_under(element.finite, root.root_index, inverse=False)
        return AffineRoot(image, root.level - self.datum.pair(element.translation, image))

    def apply_inverse(self, element: ExtAffElt, root: AffineRoot) -> AffineRoot:
        """Return ``w⁻¹(α, k) = (u⁻¹α, k + ⟨λ, α⟩)``."""
        image = self._root_under(element.finite, root.root_index, inverse=True)
        return AffineRoot(
            image, root.level + self.datum.pair(element.translation, root.root_index)
        )

    def length(self, element: ExtAffElt) -> int:
        """Length by the Iwahori–Matsumoto formula.

        ``ℓ(t^λ u)`` sums ``|⟨λ,α⟩|`` over ``α > 0`` with ``u⁻¹α > 0`` and
        ``|⟨λ,α⟩ - 1|`` over ``α > 0`` with ``u⁻¹α < 0``.
        """
        cached = self._lengths.get(element)
        if cached is not None:
            return cached
        self._check(element)
        total = 0
        for root in self.datum.positive:
            pairing = self.datum.pair(element.translation, root)
            image = self._root_under(element.finite, root, inverse=True)
            if self.datum.is_positive(image):
                total += abs(pairing)
            else:
                total += abs(pairing - 1)
        self._lengths[element] = total
        return total

    def descents(self, element: ExtAffElt, side: Side = Side.LEFT) -> IndexSet:
        """Simple affine reflections shortening `element` on the given side."""
        result = set()
        for i in self.affine_indices:
            simple_root = self.affine_simple_root(i)
            if side is Side.LEFT:
                image = self.apply_inverse(element, simple_root)
            else:
                image = self.apply(element, simple_root)
            if not image.is_positive(self.datum):
                result.add(i)
        return frozenset(result)

    def normal_form(self, element: ExtAffElt) -> NormalForm:
        """Strip smallest left descents until a length zero element remains."""
        cached = self._normal_forms.get(element)
        if cached is not None:
            return cached
        word = []
        current = element
        while True:
            descents = self.descents(current, Side.LEFT)
            if not descents:
                break
            i = min(descents)
            word.append(i)
            current = self.simple_reflection(i) * current
        coords = self.omega_coset(current)
        self._omega_reps.setdefault(coords, current)
        form = NormalForm(tuple(word), self.omega.label(coords))
        self._normal_forms[element] = form
        return form

    def reduced_word(self, element: ExtAffElt) -> NormalForm:
        """Alias of `normal_form`."""
        return self.normal_form(element)

    def omega_coset(self, element: ExtAffElt) -> OmegaCoords:
        """Image of `element` in ``Ω = W̃/W_a ≅ Λ/Q∨``."""
        return self.omega.project(element.translation)

    def omega_rep(self, coords: OmegaCoords) -> ExtAffElt:
        """The unique length zero element of an Omega-coset."""
        coords = self.omega.quotient.normalize(coords)
        rep = self._omega_reps.get(coords)
        if rep is None:
            element = self.translation(self.omega.quotient.lift(coords))
            current = element
            while descents := self.descents(current, Side.LEFT):
                current = self.simple_reflection(min(descents)) * current
            rep = current
            self._omega_reps[coords] = rep
        return rep

    def omega_rep_of(self, element: ExtAffElt) -> ExtAffElt:
        """Length zero representative of the coset of `element`."""
        return self.omega_rep(self.omega_coset(element))

    def torsion_omega_reps(self) -> list[ExtAffElt]:
        """Length zero representatives of all torsion classes of Omega."""
        return [self.omega_rep(c) for c in self.omega.quotient.torsion_elements()]

    def omega_generator_reps(self) -> list[ExtAffElt]:
        """Representatives of the Smith generators of Omega and their inverses."""
        quotient = self.omega.quotient
        reps: list[ExtAffElt] = []
        for gen in quotient.generators():
            for coords in (gen, quotient.neg(gen)):
                rep = self.omega_rep(coords)
                if rep != self.identity and rep not in reps:
                    reps.append(rep)
        return reps

    def format(self, element: ExtAffElt) -> str:
        """Normal form in the element syntax."""
        return str(self.normal_form(element))

    def shortlex_key(self, element: ExtAffElt) -> tuple[int, str, tuple[int, ...]]:
        """ShortLex key: length, then Omega label, then word."""
        form = self.normal_form(element)
        return (form.length, form.omega_label, form.word)

    def sorted(self, elements: Iterable[ExtAffElt]) -> list[ExtAffElt]:
        """Elements in ShortLex order."""
        return sorted(elements, key=self.shortlex_key)

    def token(self, token: str) -> ExtAffElt:
        """Element named by a single token.

        Raises:
            UnknownTokenError: not a generator, `e`, or an Omega label.
        """
        if token == "e":
            return self.identity
        match = GENERATOR_PATTERN.match(token)
        if match is not None:
            index = int(match["index"])
            if index in self.affine_indices:
                return self.simple_reflection(index)
            raise UnknownTokenError(token)
        coords = self.omega.coords_of_label(token)
        if coords is None:
            raise UnknownTokenError(token)
        return self.omega_rep(coords)

    def from_word(self, tokens: Iterable[str]) -> ExtAffElt:
        """Product of the named generators and Omega elements, left to right."""
        result = self.identity
        for token in tokens:
            result = result * self.token(token)
        return result

    def parse(self, text: str) -> ExtAffElt:
        """Parse whitespace separated tokens; the empty string is the identity."""
        return self.from_word(text.split())

    def enumerate_coset_ball(self, tau: ExtAffElt, bound: int) -> list[ExtAffElt]:
        """All ``w ∈ W_a·tau`` with ``ℓ(w) ≤ bound``, in ShortLex order.

        Raises:
            BoundError: `bound` is negative.
            PositiveLengthError: `tau` is not in Omega.
        """
        if bound < 0:
            raise BoundError(bound)
        if (length := self.length(tau)) != 0:
            raise PositiveLengthError(self.format(tau), length)
        seen = {tau}
        frontier = [tau]
        for current_length in range(bound):
            next_frontier = []
            for element in frontier:
                for generator in self._generators:
                    candidate = generator * element
                    if candidate in seen:
                        continue
                    if self.length(candidate) == current_length + 1:
                        seen.add(candidate)
                        next_frontier.append(candidate)
            frontier = next_frontier
        _logger.debug(
            "coset ball of %s up to length %s has %s elements",
            self.format(tau),
            bound,
            len(seen),
        )
        return self.sorted(seen)

    def parabolic_elements(self, subset: Iterable[int]) -> list[ExtAffElt]:
        """All elements of the parabolic subgroup ``W_K``, in ShortLex order.

        `subset` must be a proper subset of the simple affine reflections.
        """
        generators = [self.simple_reflection(i) for i in sorted(set(subset))]
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            element = queue.popleft()
            for generator in generators:
                candidate = generator * element
                if candidate not in seen:
                    seen.add(candidate)
                    queue.append(candidate)
        return self.sorted(seen)

    def proper_subsets(self) -> list[tuple[int, ...]]:
        """Proper subsets of the simple affine reflections, by size then index."""
        indices = list(self.affine_indices)
        subsets = [
            tuple(i for i in indices if mask >> i & 1)
            for mask in range(2 ** len(indices))
        ]
        return sorted(
            (s for s in subsets if len(s) < len(indices) or not indices),
            key=lambda s: (len(s), s),
        )

    def conjugate_simple(self, element: ExtAffElt, i: int) -> int | None:
        """Index ``j`` with ``element · s_i · element⁻¹ = s_j``, if any."""
        conjugate = element * self.simple_reflection(i) * element.inverse()
        for j in self.affine_indices:
            if self.simple_reflection(j) == conjugate:
                return j
        return None
