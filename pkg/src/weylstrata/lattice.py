"""Finitely generated abelian quotients of integer lattices.

A quotient ``Z^n / span(relations)`` is presented in Smith normal form
coordinates: with ``S R T = D`` for the relation matrix ``R`` (relations as
columns), a vector ``v`` maps to the rows of ``S v`` whose diagonal entry is
not a unit, reduced modulo that entry. Zero diagonal entries give free
coordinates.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from sympy import Matrix
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import smith_normal_decomp

from weylstrata.types import IntMatrix, IntVector, OmegaCoords

_logger = logging.getLogger(__name__)


def identity_matrix(size: int) -> IntMatrix:
    """Return the integer identity matrix of the given size."""
    return tuple(tuple(int(i == j) for j in range(size)) for i in range(size))


def mat_vec(matrix: IntMatrix, vector: Sequence[int]) -> IntVector:
    """Multiply a matrix with a column vector."""
    return tuple(sum(a * b for a, b in zip(row, vector, strict=True)) for row in matrix)


def vec_mat(vector: Sequence[int], matrix: IntMatrix) -> IntVector:
    """Multiply a row vector with a matrix."""
    if not matrix:
        return ()
    return tuple(
        sum(vector[k] * matrix[k][j] for k in range(len(matrix)))
        for j in range(len(matrix[0]))
    )


def mat_mul(left: IntMatrix, right: IntMatrix) -> IntMatrix:
    """Multiply two square integer matrices."""
    columns = tuple(zip(*right))
    return tuple(
        tuple(sum(a * b for a, b in zip(row, col)) for col in columns) for row in left
    )


def to_int_matrix(matrix: Matrix) -> IntMatrix:
    """Convert an integral sympy matrix into nested tuples.

    Raises:
        ValueError: an entry is not an integer.
    """
    rows = []
    for i in range(matrix.rows):
        row = []
        for j in range(matrix.cols):
            entry = matrix[i, j]
            if not entry.is_integer:
                raise ValueError(f"matrix entry {entry} is not integral")
            row.append(int(entry))
        rows.append(tuple(row))
    return tuple(rows)


def invert_unimodular(matrix: IntMatrix) -> IntMatrix:
    """Invert an integer matrix whose inverse is integral."""
    if not matrix:
        return ()
    return to_int_matrix(Matrix(matrix).inv())


@dataclass(frozen=True)
class AbelianQuotient:
    """The group ``Z^n / span(relations)`` in Smith normal form coordinates.

    Coordinates list the torsion part first, one entry per invariant factor
    (``moduli[i] > 1``, each dividing the next), followed by the free part
    (``moduli[i] == 0``).
    """

    ambient_rank: int
    moduli: tuple[int, ...]
    projection_rows: IntMatrix
    lift_columns: IntMatrix

    @property
    def invariants(self) -> tuple[int, ...]:
        """Orders of the cyclic torsion factors."""
        return tuple(d for d in self.moduli if d)

    @property
    def free_rank(self) -> int:
        """Rank of the free part."""
        return sum(1 for d in self.moduli if d == 0)

    @property
    def order(self) -> int | None:
        """Group order, `None` when the group is infinite."""
        if self.free_rank:
            return None
        result = 1
        for d in self.invariants:
            result *= d
        return result

    @property
    def zero(self) -> OmegaCoords:
        """Coordinates of the neutral element."""
        return (0,) * len(self.moduli)

    def normalize(self, coords: Sequence[int]) -> OmegaCoords:
        """Reduce torsion coordinates into their canonical range."""
        return tuple(c % d if d else c for c, d in zip(coords, self.moduli, strict=True))

    def project(self, vector: Sequence[int]) -> OmegaCoords:
        """Map a lattice vector to its class."""
        return self.normalize(mat_vec(self.projection_rows, vector))

    def lift(self, coords: Sequence[int]) -> IntVector:
        """Return a lattice vector projecting onto `coords`."""
        result = [0] * self.ambient_rank
        for coord, column in zip(coords, self.lift_columns, strict=True):
            for k, entry in enumerate(column):
                result[k] += coord * entry
        return tuple(result)

    def add(self, first: Sequence[int], second: Sequence[int]) -> OmegaCoords:
        """Group law."""
        return self.normalize([a + b for a, b in zip(first, second, strict=True)])

    def neg(self, coords: Sequence[int]) -> OmegaCoords:
        """Group inverse."""
        return self.normalize([-c for c in coords])

    def is_torsion(self, coords: Sequence[int]) -> bool:
        """Whether the class has finite order."""
        return all(c == 0 for c, d in zip(coords, self.moduli, strict=True) if d == 0)

    def generators(self) -> list[OmegaCoords]:
        """Unit vectors of the Smith coordinates."""
        return [
            tuple(int(i == j) for j in range(len(self.moduli)))
            for i in range(len(self.moduli))
        ]

    def torsion_elements(self) -> Iterator[OmegaCoords]:
        """Enumerate the torsion subgroup, lexicographically."""
        free = (0,) * self.free_rank
        for torsion in product(*(range(d) for d in self.invariants)):
            yield tuple(torsion) + free

    def subgroup(self, generators: Iterable[Sequence[int]]) -> frozenset[OmegaCoords]:
        """Return the subgroup generated by torsion classes.

        Raises:
            ValueError: a generator has infinite order.
        """
        gens = [self.normalize(g) for g in generators]
        for gen in gens:
            if not self.is_torsion(gen):
                raise ValueError(f"generator {gen} has infinite order")
        seen = {self.zero}
        queue = deque([self.zero])
        while queue:
            current = queue.popleft()
            for gen in gens:
                nxt = self.add(current, gen)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return frozenset(seen)


def abelian_quotient(
    ambient_rank: int, relations: Sequence[Sequence[int]]
) -> AbelianQuotient:
    """Present ``Z^ambient_rank`` modulo the span of `relations`.

    Args:
        ambient_rank: Rank of the ambient lattice.
        relations: Relation vectors of length `ambient_rank`.

    Returns:
        The quotient in Smith normal form coordinates.
    """
    relations = [tuple(r) for r in relations if any(r)]
    if ambient_rank == 0:
        return AbelianQuotient(0, (), (), ())
    if not relations:
        basis = identity_matrix(ambient_rank)
        return AbelianQuotient(ambient_rank, (0,) * ambient_rank, basis, basis)

    columns = [[r[i] for r in relations] for i in range(ambient_rank)]
    smith, left, _ = smith_normal_decomp(DM(columns, ZZ))
    diagonal = smith.to_Matrix()
    left_rows = to_int_matrix(left.to_Matrix())
    left_inverse = invert_unimodular(left_rows)

    moduli = []
    kept = []
    for i in range(ambient_rank):
        d = abs(int(diagonal[i, i])) if i < len(relations) else 0
        if d == 1:
            continue
        moduli.append(d)
        kept.append(i)
    _logger.debug(
        "quotient of Z^%s by %s relations has moduli %s",
        ambient_rank,
        len(relations),
        moduli,
    )
    return AbelianQuotient(
        ambient_rank=ambient_rank,
        moduli=tuple(moduli),
        projection_rows=tuple(left_rows[i] for i in kept),
        lift_columns=tuple(
            tuple(left_inverse[k][i] for k in range(ambient_rank)) for i in kept
        ),
    )
