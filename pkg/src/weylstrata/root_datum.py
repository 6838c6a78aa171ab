"""Root data, affine roots and the abelian quotient Ω = Λ/Q∨.

Conventions:

- The cocharacter lattice Λ is ``Z^dimension``. Coroots are vectors in Λ and
  roots are integer functionals on Λ (``functionals``), so pairings are plain
  dot products.
- Roots themselves are recorded in simple-root coordinates. Cartan integers
  follow ``cartan[i][j] = ⟨α_i∨, α_j⟩`` with Bourbaki node numbering.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from sympy import Matrix

from weylstrata.elements import FinWeylElt
from weylstrata.lattice import AbelianQuotient, abelian_quotient, to_int_matrix
from weylstrata.types import IntMatrix, IntVector, OmegaCoords, WeylStrataError

_logger = logging.getLogger(__name__)

_CARTAN_TYPE = re.compile(r"^(?P<family>[A-G])(?P<rank>\d+)$")
LABEL_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
GENERATOR_PATTERN = re.compile(r"^s(?P<index>\d+)$")
GENERATED_LABEL_PATTERN = re.compile(r"^o(?P<coords>-?\d+(?:_-?\d+)*)$")


class InvalidCartanTypeError(WeylStrataError):
    """The Cartan type is unknown or has an unsupported rank."""

    module = "root_datum"

    def __init__(self, cartan_type: str) -> None:
        """Init.

        Args:
            cartan_type: The offending type, for example `"D2"`.
        """
        self.cartan_type = cartan_type
        super().__init__(f"unsupported cartan type {cartan_type!r}")


class LatticeError(WeylStrataError):
    """The lattice choice is not a valid cocharacter lattice."""

    module = "root_datum"


class RootSystemError(WeylStrataError):
    """The root list is not reduced or does not match the Cartan type."""

    module = "root_datum"


def _chain(rank: int) -> list[list[int]]:
    matrix = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        matrix[i][i] = 2
    for i in range(rank - 1):
        matrix[i][i + 1] = matrix[i + 1][i] = -1
    return matrix


def _from_edges(rank: int, edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    matrix = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        matrix[i][i] = 2
    for i, j in edges:
        matrix[i][j] = matrix[j][i] = -1
    return matrix


def cartan_matrix(cartan_type: str) -> IntMatrix:
    """Return the Cartan matrix ``⟨α_i∨, α_j⟩`` of an irreducible type.

    Args:
        cartan_type: `A1`, `B3`, `G2`, ... or `T` for the rank zero type.

    Raises:
        InvalidCartanTypeError: unknown family or unsupported rank.
    """
    if cartan_type == "T":
        return ()
    match = _CARTAN_TYPE.match(cartan_type)
    if match is None:
        raise InvalidCartanTypeError(cartan_type)
    family, rank = match["family"], int(match["rank"])

    match family:
        case "A" if rank >= 1:
            matrix = _chain(rank)
        case "B" if rank >= 2:
            matrix = _chain(rank)
            matrix[rank - 1][rank - 2] = -2
        case "C" if rank >= 2:
            matrix = _chain(rank)
            matrix[rank - 2][rank - 1] = -2
        case "D" if rank >= 4:
            edges = [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
            matrix = _from_edges(rank, edges)
        case "E" if 6 <= rank <= 8:
            edges = [(0, 2), (1, 3)] + [(i, i + 1) for i in range(2, rank - 1)]
            matrix = _from_edges(rank, edges)
        case "F" if rank == 4:
            matrix = _chain(4)
            matrix[2][1] = -2
        case "G" if rank == 2:
            matrix = _chain(2)
            matrix[0][1] = -3
        case _:
            raise InvalidCartanTypeError(cartan_type)
    return tuple(tuple(row) for row in matrix)


@dataclass(frozen=True)
class CartanSpec:
    """Input of `build_root_datum`.

    Args:
        cartan_type: Irreducible Cartan type or `T`.
        lattice: `"simply_connected"`, `"adjoint"` or basis rows of Λ in
            fundamental coweight coordinates.
        central_rank: Number of extra central cocharacter directions.
        simple_roots: Optional explicit simple roots as functionals on Λ.
        simple_coroots: Optional explicit simple coroots as vectors of Λ.
    """

    cartan_type: str
    lattice: str | IntMatrix = "simply_connected"
    central_rank: int = 0
    simple_roots: IntMatrix | None = None
    simple_coroots: IntMatrix | None = None


@dataclass(frozen=True, eq=False)
class RootDatum:
    """A reduced root datum on the lattice ``Λ = Z^dimension``."""

    cartan_type: str
    cartan: IntMatrix
    dimension: int
    roots: tuple[IntVector, ...]
    """Roots in simple-root coordinates."""
    functionals: tuple[IntVector, ...]
    """Root ``i`` as a functional on Λ."""
    coroots: tuple[IntVector, ...]
    """Coroot of root ``i`` as a vector of Λ."""
    positive: tuple[int, ...]
    simple: tuple[int, ...]
    """Indices of the simple roots, in Cartan order."""
    highest_root: int | None
    lattice_basis: IntMatrix
    root_index: Mapping[IntVector, int] = field(repr=False)
    """Functional to root index."""
    negation: tuple[int, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        """Semisimple rank."""
        return len(self.simple)

    @property
    def two_rho(self) -> IntVector:
        """Sum of the positive roots, in simple-root coordinates."""
        return tuple(
            sum(self.roots[i][j] for i in self.positive) for j in range(self.rank)
        )

    @property
    def two_rho_functional(self) -> IntVector:
        """Sum of the positive roots as a functional on Λ."""
        return tuple(
            sum(self.functionals[i][k] for i in self.positive)
            for k in range(self.dimension)
        )

    def is_positive(self, root: int) -> bool:
        """Whether root `root` is positive."""
        return all(c >= 0 for c in self.roots[root])

    def pair(self, vector: Sequence[int], root: int) -> int:
        """Return ``⟨vector, root⟩`` for an integer vector."""
        return sum(a * b for a, b in zip(vector, self.functionals[root], strict=True))

    def pair_rational(self, vector: Sequence[Fraction], root: int) -> Fraction:
        """Return ``⟨vector, root⟩`` for a rational vector."""
        return sum(
            (Fraction(a) * b for a, b in zip(self.functionals[root], vector)),
            Fraction(0),
        )

    def two_rho_pairing(self, vector: Sequence[Fraction]) -> Fraction:
        """Return ``⟨vector, 2ρ⟩``."""
        return sum(
            (Fraction(a) * b for a, b in zip(self.two_rho_functional, vector)), Fraction(0)
        )

    def reflection(self, root: int) -> FinWeylElt:
        """The reflection ``λ ↦ λ - ⟨λ, α⟩ α∨`` in root `root`."""
        coroot, functional = self.coroots[root], self.functionals[root]
        matrix = tuple(
            tuple(
                int(a == b) - coroot[a] * functional[b] for b in range(self.dimension)
            )
            for a in range(self.dimension)
        )
        return FinWeylElt(matrix, matrix)

    def simple_reflection(self, i: int) -> FinWeylElt:
        """Reflection in the finite simple root with Cartan index `i`."""
        return self.reflection(self.simple[i])


def _generate_roots(
    cartan: IntMatrix,
) -> tuple[list[IntVector], list[IntVector]]:
    """Close the simple roots and coroots under simple reflections.

    Returns:
        Roots and matching coroots, both in simple (co)root coordinates.
    """
    rank = len(cartan)
    units = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    roots: list[IntVector] = list(units)
    coroots: list[IntVector] = list(units)
    seen = {root: idx for idx, root in enumerate(roots)}
    queue = deque(range(rank))
    while queue:
        idx = queue.popleft()
        root, coroot = roots[idx], coroots[idx]
        for i in range(rank):
            # ⟨α_i∨, β⟩ and ⟨β∨, α_i⟩
            root_pairing = sum(root[j] * cartan[i][j] for j in range(rank))
            coroot_pairing = sum(coroot[k] * cartan[k][i] for k in range(rank))
            image = tuple(c - root_pairing * int(j == i) for j, c in enumerate(root))
            if image in seen:
                continue
            seen[image] = len(roots)
            roots.append(image)
            coroots.append(
                tuple(c - coroot_pairing * int(j == i) for j, c in enumerate(coroot))
            )
            queue.append(len(roots) - 1)
    return roots, coroots


def _lattice_rows(spec: CartanSpec, cartan: IntMatrix) -> IntMatrix:
    rank = len(cartan)
    match spec.lattice:
        case "simply_connected":
            return cartan
        case "adjoint":
            return tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank))
        case str():
            raise LatticeError(f"unknown lattice choice {spec.lattice!r}")
        case rows:
            if len(rows) != rank or any(len(row) != rank for row in rows):
                raise LatticeError(f"lattice basis must be a {rank}x{rank} matrix")
            return tuple(tuple(int(c) for c in row) for row in rows)


def _explicit_structure(
    spec: CartanSpec, cartan: IntMatrix
) -> tuple[int, list[IntVector], list[IntVector], IntMatrix]:
    """Simple root functionals and coroot vectors given explicitly."""
    assert spec.simple_roots is not None and spec.simple_coroots is not None
    rank = len(cartan)
    if len(spec.simple_roots) != rank or len(spec.simple_coroots) != rank:
        raise RootSystemError(f"{spec.cartan_type} needs {rank} simple (co)roots")
    widths = {len(v) for v in (*spec.simple_roots, *spec.simple_coroots)}
    if len(widths) > 1:
        raise RootSystemError("simple roots and coroots must have equal length")
    dimension = widths.pop() if widths else spec.central_rank
    functionals = [tuple(row) for row in spec.simple_roots]
    coroots = [tuple(row) for row in spec.simple_coroots]
    produced = tuple(
        tuple(sum(f * c for f, c in zip(functionals[j], coroots[i])) for j in range(rank))
        for i in range(rank)
    )
    if produced != cartan:
        raise RootSystemError(
            f"simple roots and coroots give cartan matrix {produced}, "
            f"not the one of {spec.cartan_type}"
        )
    basis = tuple(
        tuple(int(i == j) for j in range(dimension)) for i in range(dimension)
    )
    return dimension, functionals, coroots, basis


def _lattice_structure(
    spec: CartanSpec, cartan: IntMatrix
) -> tuple[int, list[IntVector], list[IntVector], IntMatrix]:
    """Simple root functionals and coroot vectors in the basis of Λ."""
    rank = len(cartan)
    rows = _lattice_rows(spec, cartan)
    central = spec.central_rank
    if rank:
        basis = Matrix(rows)
        if basis.det() == 0:
            raise LatticeError("lattice basis is degenerate")
        try:
            coordinates = to_int_matrix(basis.T.inv() * Matrix(cartan).T)
        except ValueError:
            raise LatticeError("lattice does not contain Q∨") from None
    else:
        coordinates = ()
    functionals = [
        tuple(rows[k][j] for k in range(rank)) + (0,) * central for j in range(rank)
    ]
    coroots = [
        tuple(coordinates[k][i] for k in range(rank)) + (0,) * central
        for i in range(rank)
    ]
    basis_rows = tuple(tuple(row) + (0,) * central for row in rows) + tuple(
        (0,) * rank + tuple(int(i == j) for j in range(central)) for i in range(central)
    )
    return rank + central, functionals, coroots, basis_rows


def build_root_datum(spec: CartanSpec) -> RootDatum:
    """Construct and validate a root datum.

    Args:
        spec: Cartan type and lattice choice.

    Raises:
        InvalidCartanTypeError: unknown Cartan type.
        LatticeError: the lattice does not contain the coroot lattice.
        RootSystemError: the explicit simple (co)roots are inconsistent.

    Returns:
        The root datum with all derived tables filled.
    """
    if spec.central_rank < 0:
        raise LatticeError("central_rank must be non-negative")
    cartan = cartan_matrix(spec.cartan_type)
    if spec.simple_roots is not None or spec.simple_coroots is not None:
        if spec.simple_roots is None or spec.simple_coroots is None:
            raise RootSystemError("simple_roots and simple_coroots go together")
        dimension, simple_functionals, simple_coroots, basis = _explicit_structure(
            spec, cartan
        )
    else:
        dimension, simple_functionals, simple_coroots, basis = _lattice_structure(
            spec, cartan
        )

    roots, coroot_coords = _generate_roots(cartan)
    rank = len(cartan)
    functionals = [
        tuple(
            sum(root[j] * simple_functionals[j][k] for j in range(rank))
            for k in range(dimension)
        )
        for root in roots
    ]
    coroots = [
        tuple(
            sum(coroot[j] * simple_coroots[j][k] for j in range(rank))
            for k in range(dimension)
        )
        for coroot in coroot_coords
    ]

    root_index: dict[IntVector, int] = {}
    for idx, functional in enumerate(functionals):
        if functional in root_index:
            raise RootSystemError(f"roots {root_index[functional]} and {idx} coincide")
        root_index[functional] = idx
    for idx, functional in enumerate(functionals):
        if tuple(2 * c for c in functional) in root_index:
            raise RootSystemError(f"root {idx} has its double in the root system")
        if sum(f * c for f, c in zip(functional, coroots[idx])) != 2:
            raise RootSystemError(f"root {idx} does not pair to 2 with its coroot")

    negation = tuple(root_index[tuple(-c for c in f)] for f in functionals)
    positive = tuple(i for i, root in enumerate(roots) if all(c >= 0 for c in root))
    highest = max(positive, key=lambda i: sum(roots[i])) if positive else None

    datum = RootDatum(
        cartan_type=spec.cartan_type,
        cartan=cartan,
        dimension=dimension,
        roots=tuple(roots),
        functionals=tuple(functionals),
        coroots=tuple(coroots),
        positive=positive,
        simple=tuple(range(rank)),
        highest_root=highest,
        lattice_basis=basis,
        root_index=root_index,
        negation=negation,
    )
    _logger.debug(
        "built %s on a rank %s lattice with %s positive roots",
        spec.cartan_type,
        dimension,
        len(positive),
    )
    return datum


@dataclass(frozen=True)
class AffineRoot:
    """The affine function ``x ↦ ⟨x, α⟩ + level`` for root ``α = root_index``."""

    root_index: int
    level: int

    def is_positive(self, datum: RootDatum) -> bool:
        """Positive on the base alcove."""
        return self.level > 0 or (
            self.level == 0 and datum.is_positive(self.root_index)
        )


def dominant_rep(
    datum: RootDatum, vector: Sequence[Fraction | int]
) -> tuple[tuple[Fraction, ...], FinWeylElt]:
    """Return the dominant element of the W₀-orbit of `vector`.

    Args:
        datum: The root datum.
        vector: A vector of ``V = Λ ⊗ Q``.

    Returns:
        The dominant representative ``v̄`` and ``u ∈ W₀`` with ``u(vector) = v̄``.
    """
    current = tuple(Fraction(c) for c in vector)
    witness = FinWeylElt.identity(datum.dimension)
    while True:
        for j in datum.simple:
            if datum.pair_rational(current, j) < 0:
                reflection = datum.reflection(j)
                current = reflection.act_rational(current)
                witness = reflection * witness
                break
        else:
            return current, witness


@dataclass(frozen=True, eq=False)
class OmegaGroup:
    """The quotient ``Ω ≅ Λ/Q∨`` with optional declared labels.

    Elements are Smith normal form coordinates. The twist acts on them
    through `weylstrata.twist.Twist.omega_action`.
    """

    quotient: AbelianQuotient
    declared: Mapping[OmegaCoords, str] = field(default_factory=dict)

    def project(self, vector: Sequence[int]) -> OmegaCoords:
        """Class of a lattice vector."""
        return self.quotient.project(vector)

    def label(self, coords: OmegaCoords) -> str:
        """Label of a class, empty for the identity class."""
        if coords in self.declared:
            return self.declared[coords]
        if not any(coords):
            return ""
        return "o" + "_".join(str(c) for c in coords)

    def coords_of_label(self, label: str) -> OmegaCoords | None:
        """Parse a declared or generated label, `None` when unknown."""
        for coords, name in self.declared.items():
            if name == label:
                return coords
        match = GENERATED_LABEL_PATTERN.match(label)
        if match is None:
            return None
        coords = tuple(int(c) for c in match["coords"].split("_"))
        if len(coords) != len(self.quotient.moduli):
            return None
        return self.quotient.normalize(coords)


def omega_group(
    datum: RootDatum, labels: Mapping[str, Sequence[int]] | None = None
) -> OmegaGroup:
    """Present ``Λ/Q∨`` by Smith normal form.

    Args:
        datum: The root datum.
        labels: Declared labels, mapping a name to a lattice vector of its class.

    Raises:
        LatticeError: a label is malformed, names the trivial class, or two
            labels name the same class.
    """
    simple_coroots = [datum.coroots[i] for i in datum.simple]
    quotient = abelian_quotient(datum.dimension, simple_coroots)
    declared: dict[OmegaCoords, str] = {}
    for name, vector in (labels or {}).items():
        if (
            not LABEL_PATTERN.match(name)
            or GENERATOR_PATTERN.match(name)
            or GENERATED_LABEL_PATTERN.match(name)
            or name == "e"
        ):
            raise LatticeError(f"omega label {name!r} is not a free identifier")
        if len(vector) != datum.dimension:
            raise LatticeError(
                f"omega label {name!r} needs {datum.dimension} coordinates"
            )
        coords = quotient.project(vector)
        if not any(coords):
            raise LatticeError(f"omega label {name!r} names the trivial class")
        if coords in declared:
            raise LatticeError(
                f"omega labels {declared[coords]!r} and {name!r} name the same class"
            )
        declared[coords] = name
    _logger.debug("omega has moduli %s", quotient.moduli)
    return OmegaGroup(quotient, declared)
