"""Value types of the extended affine Weyl group.

An element ``t^λ u`` of ``W̃ = Λ ⋊ W₀`` is stored as its translation part
``λ`` (coordinates in the basis of Λ) and its finite part ``u``, an integer
matrix acting on Λ.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from weylstrata.lattice import identity_matrix, mat_mul, mat_vec
from weylstrata.types import IntMatrix, IntVector, WeylStrataError


class MismatchedDatumError(WeylStrataError):
    """Elements from different root data were combined."""

    module = "weyl"

    def __init__(self, first: int, second: int) -> None:
        """Init.

        Args:
            first: Lattice rank of the first operand.
            second: Lattice rank of the second operand.
        """
        self.first = first
        self.second = second
        super().__init__(
            f"elements live on lattices of rank {first} and {second}"
        )


@dataclass(frozen=True)
class FinWeylElt:
    """An element of the finite Weyl group, as a matrix acting on Λ."""

    matrix: IntMatrix
    inverse_matrix: IntMatrix = field(compare=False, repr=False)

    @classmethod
    def identity(cls, dimension: int) -> FinWeylElt:
        """Return the identity on a lattice of the given rank."""
        ident = identity_matrix(dimension)
        return cls(ident, ident)

    @property
    def dimension(self) -> int:
        """Rank of the lattice acted on."""
        return len(self.matrix)

    def __mul__(self, other: FinWeylElt) -> FinWeylElt:
        if self.dimension != other.dimension:
            raise MismatchedDatumError(self.dimension, other.dimension)
        return FinWeylElt(
            mat_mul(self.matrix, other.matrix),
            mat_mul(other.inverse_matrix, self.inverse_matrix),
        )

    def inverse(self) -> FinWeylElt:
        """Return the inverse element."""
        return FinWeylElt(self.inverse_matrix, self.matrix)

    def act(self, vector: Sequence[int]) -> IntVector:
        """Apply to an integer vector."""
        return mat_vec(self.matrix, vector)

    def act_rational(self, vector: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Apply to a rational vector."""
        return tuple(
            sum((Fraction(a) * b for a, b in zip(row, vector)), Fraction(0))
            for row in self.matrix
        )

    @property
    def is_identity(self) -> bool:
        """Whether this is the neutral element."""
        return self.matrix == identity_matrix(self.dimension)


@dataclass(frozen=True)
class ExtAffElt:
    """The element ``t^translation · finite`` of the extended affine Weyl group."""

    translation: IntVector
    finite: FinWeylElt

    @classmethod
    def identity(cls, dimension: int) -> ExtAffElt:
        """Return the neutral element."""
        return cls((0,) * dimension, FinWeylElt.identity(dimension))

    @classmethod
    def pure_translation(cls, vector: Sequence[int]) -> ExtAffElt:
        """Return ``t^vector``."""
        return cls(tuple(vector), FinWeylElt.identity(len(vector)))

    @property
    def dimension(self) -> int:
        """Rank of the lattice."""
        return len(self.translation)

    @property
    def is_translation(self) -> bool:
        """Whether the finite part is trivial."""
        return self.finite.is_identity

    def __mul__(self, other: ExtAffElt) -> ExtAffElt:
        if self.dimension != other.dimension:
            raise MismatchedDatumError(self.dimension, other.dimension)
        moved = self.finite.act(other.translation)
        return ExtAffElt(
            tuple(a + b for a, b in zip(self.translation, moved)),
            self.finite * other.finite,
        )

    def inverse(self) -> ExtAffElt:
        """Return the group inverse."""
        finite_inverse = self.finite.inverse()
        return ExtAffElt(
            tuple(-c for c in finite_inverse.act(self.translation)), finite_inverse
        )

    def act(self, point: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Apply the affine map ``x ↦ translation + finite(x)`` to a point of V."""
        moved = self.finite.act_rational(point)
        return tuple(Fraction(a) + b for a, b in zip(self.translation, moved))


@dataclass(frozen=True)
class NormalForm:
    """Reduced word over the simple affine reflections followed by an Omega label.

    The element equals ``s_{word[0]} ··· s_{word[-1]} · τ`` with τ the canonical
    length zero representative named by `omega_label` (empty for the identity
    class).
    """

    word: tuple[int, ...]
    omega_label: str = ""

    @property
    def length(self) -> int:
        """Length of the element."""
        return len(self.word)

    def tokens(self) -> list[str]:
        """Tokens in the element syntax."""
        tokens = [f"s{i}" for i in self.word]
        if self.omega_label:
            tokens.append(self.omega_label)
        return tokens

    def __str__(self) -> str:
        return " ".join(self.tokens()) or "e"
