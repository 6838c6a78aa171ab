"""The twist ``θ = Ad(τ₀) ∘ δ`` of the extended affine Weyl group.

δ is the lattice automorphism induced by a diagram automorphism of the
finite Dynkin diagram: it permutes the simple coroots and fixes the central
directions of Λ. τ₀ is an element of Omega.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from sympy import Matrix

from weylstrata.elements import ExtAffElt, FinWeylElt
from weylstrata.lattice import AbelianQuotient, abelian_quotient, to_int_matrix
from weylstrata.types import IntMatrix, OmegaCoords, WeylStrataError
from weylstrata.weyl import ExtendedAffineWeylGroup, UnknownTokenError

_logger = logging.getLogger(__name__)

# θ must return to the identity on the generators of W̃ within this many
# iterations
ORDER_LIMIT = 1000


class TwistError(WeylStrataError):
    """The twist data does not define a length preserving automorphism."""

    module = "twist"


@dataclass(frozen=True)
class TwistSpec:
    """Input of `build_twist`.

    Args:
        diagram_perm: Permutation of the finite simple roots, 0-based. An empty
            tuple means the identity.
        omega: Optional Omega label (or any token naming a length zero
            element) for τ₀.
        check_depth: Radius of the ball on which length preservation is checked.
    """

    diagram_perm: tuple[int, ...] = ()
    omega: str | None = None
    check_depth: int = 3


@dataclass(frozen=True, eq=False)
class Twist:
    """A validated twist.

    `affine_perm[i]` is the index ``j`` with ``θ(s_i) = s_j``. `order` is the
    order of θ as an automorphism of W̃.
    """

    group: ExtendedAffineWeylGroup
    diagram_perm: tuple[int, ...]
    delta: FinWeylElt
    tau0: ExtAffElt
    affine_perm: tuple[int, ...]
    order: int
    kappa_quotient: AbelianQuotient = field(repr=False)

    @property
    def is_identity(self) -> bool:
        """Whether θ is the identity on W̃."""
        return self.tau0 == self.group.identity and self.delta.is_identity

    def delta_of(self, element: ExtAffElt) -> ExtAffElt:
        """Apply δ."""
        return ExtAffElt(
            self.delta.act(element.translation),
            self.delta * element.finite * self.delta.inverse(),
        )

    def apply(self, element: ExtAffElt) -> ExtAffElt:
        """Return ``θ(element)``."""
        if self.is_identity:
            return element
        return self.tau0 * self.delta_of(element) * self.tau0.inverse()

    def apply_power(self, element: ExtAffElt, power: int) -> ExtAffElt:
        """Return ``θ^power(element)`` for ``power ≥ 0``."""
        for _ in range(power):
            element = self.apply(element)
        return element

    def conjugate(self, conjugator: ExtAffElt, element: ExtAffElt) -> ExtAffElt:
        """Twisted conjugation ``x · w · θ(x)⁻¹``."""
        return conjugator * element * self.apply(conjugator).inverse()

    def omega_action(self, coords: OmegaCoords) -> OmegaCoords:
        """Action of θ on Omega coordinates."""
        quotient = self.group.omega.quotient
        return quotient.project(self.delta.act(quotient.lift(coords)))

    def kappa(self, element: ExtAffElt) -> OmegaCoords:
        """Class of `element` in the coinvariants ``Ω_θ``."""
        return self.kappa_quotient.project(element.translation)

    def coinvariant_relations(self) -> list[OmegaCoords]:
        """Omega classes of ``(1 - δ)e_j`` for the basis vectors of Λ."""
        quotient = self.group.omega.quotient
        size = self.group.dimension
        return [
            quotient.project(
                [int(k == j) - self.delta.matrix[k][j] for k in range(size)]
            )
            for j in range(size)
        ]


def _check_diagram_perm(cartan: IntMatrix, perm: tuple[int, ...]) -> None:
    rank = len(cartan)
    if sorted(perm) != list(range(rank)):
        raise TwistError(f"{list(perm)} is not a permutation of the simple roots")
    for i in range(rank):
        for j in range(rank):
            if cartan[perm[i]][perm[j]] != cartan[i][j]:
                raise TwistError(f"{list(perm)} is not a diagram automorphism")


def _delta_matrix(group: ExtendedAffineWeylGroup, perm: tuple[int, ...]) -> FinWeylElt:
    """Lattice automorphism sending ``α_i∨`` to ``α_σ(i)∨`` and fixing the centre."""
    datum = group.datum
    dimension = datum.dimension
    if perm == tuple(range(datum.rank)):
        return FinWeylElt.identity(dimension)
    simple_coroots = [datum.coroots[i] for i in datum.simple]
    central = Matrix([datum.functionals[i] for i in datum.simple]).nullspace()
    source = Matrix.hstack(*(Matrix(c) for c in simple_coroots), *central)
    target = Matrix.hstack(
        *(Matrix(simple_coroots[perm[i]]) for i in range(datum.rank)), *central
    )
    delta = target * source.inv()
    try:
        matrix = to_int_matrix(delta)
        inverse = to_int_matrix(delta.inv())
    except ValueError:
        raise TwistError("δ does not preserve the lattice") from None
    return FinWeylElt(matrix, inverse)


def _order_on_group(twist: Twist) -> int:
    """Least ``k ≥ 1`` with ``θ^k`` fixing the simple reflections and Omega generators."""
    group = twist.group
    generators = [
        group.simple_reflection(i) for i in group.affine_indices
    ] + group.omega_generator_reps()
    images = list(generators)
    for order in range(1, ORDER_LIMIT + 1):
        images = [twist.apply(image) for image in images]
        if images == generators:
            return order
    raise TwistError(f"θ has no finite order on W̃ within {ORDER_LIMIT} iterations")


def build_twist(group: ExtendedAffineWeylGroup, spec: TwistSpec) -> Twist:
    """Construct and validate ``θ = Ad(τ₀) ∘ δ``.

    Args:
        group: The extended affine Weyl group.
        spec: Diagram permutation and Omega part.

    Raises:
        TwistError: the permutation is not a diagram automorphism, δ does not
            preserve Λ, θ is not length preserving or has infinite order.

    Returns:
        The validated twist.
    """
    datum = group.datum
    perm = spec.diagram_perm or tuple(range(datum.rank))
    _check_diagram_perm(datum.cartan, perm)
    delta = _delta_matrix(group, perm)

    tau0 = group.identity
    if spec.omega is not None:
        try:
            tau0 = group.token(spec.omega)
        except UnknownTokenError:
            raise TwistError(f"unknown omega label {spec.omega!r}") from None
        if group.length(tau0) != 0:
            raise TwistError(f"{spec.omega!r} does not name an element of Omega")

    relations = [datum.coroots[i] for i in datum.simple] + [
        tuple(int(k == j) - delta.matrix[k][j] for k in range(datum.dimension))
        for j in range(datum.dimension)
    ]
    draft = Twist(
        group=group,
        diagram_perm=perm,
        delta=delta,
        tau0=tau0,
        affine_perm=(),
        order=0,
        kappa_quotient=abelian_quotient(datum.dimension, relations),
    )

    affine_perm = []
    for i in group.affine_indices:
        image = draft.apply(group.simple_reflection(i))
        matches = [j for j in group.affine_indices if group.simple_reflection(j) == image]
        if not matches:
            raise TwistError(f"θ(s{i}) is not a simple reflection")
        affine_perm.append(matches[0])
    order = _order_on_group(draft)

    twist = Twist(
        group=group,
        diagram_perm=perm,
        delta=delta,
        tau0=tau0,
        affine_perm=tuple(affine_perm),
        order=order,
        kappa_quotient=draft.kappa_quotient,
    )
    for tau in group.torsion_omega_reps():
        for element in group.enumerate_coset_ball(tau, spec.check_depth):
            if group.length(twist.apply(element)) != group.length(element):
                raise TwistError(
                    f"θ changes the length of {group.format(element)}"
                )
    _logger.debug(
        "twist with diagram permutation %s and affine permutation %s has order %s",
        perm,
        twist.affine_perm,
        order,
    )
    return twist
