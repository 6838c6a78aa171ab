"""Rigid stratum labels, standard pairs and minimal double coset representatives.

A label is rigid when its Newton vector pairs to zero with every root. Every
minimal length element over a rigid label lies in ``W_K·τ`` for a standard
pair ``(K, τ)``: a finite type subset ``K`` of the simple affine reflections
and ``τ ∈ Ω`` with ``Ad(τ)θ(K) = K``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from weylstrata.elements import ExtAffElt
from weylstrata.newton import NewtonEngine, NewtonPair
from weylstrata.types import IndexSet, Side, WeylStrataError
from weylstrata.weyl import BoundError, PositiveLengthError

_logger = logging.getLogger(__name__)


class NotStandardPairError(WeylStrataError):
    """``Ad(τ)θ`` does not stabilize the subset, or the subset is not of finite type."""

    module = "rigid"

    def __init__(self, subset: Sequence[int], tau: str) -> None:
        """Init.

        Args:
            subset: Indices of the simple affine reflections.
            tau: Normal form of the Omega element.
        """
        super().__init__(f"({list(subset)}, {tau or 'e'}) is not a standard pair")


class RigidCoverError(WeylStrataError):
    """An element cannot be covered by a standard pair."""

    module = "rigid"


@dataclass(frozen=True)
class LeviDescriptor:
    """Roots orthogonal to a Newton vector."""

    roots: frozenset[int]
    full: bool


@dataclass(frozen=True)
class StandardPair:
    """A θ-stable pair of a finite type subset and an Omega element."""

    subset: tuple[int, ...]
    tau: ExtAffElt


class RigidAnalysis:
    """Rigid part of the stratification for one twist."""

    def __init__(self, engine: NewtonEngine) -> None:
        """Init.

        Args:
            engine: Newton engine of the twist.
        """
        self.engine = engine
        self.group = engine.group
        self.twist = engine.twist

    def levi(self, pair: NewtonPair) -> LeviDescriptor:
        """Roots pairing to zero with the Newton vector of `pair`."""
        datum = self.group.datum
        roots = frozenset(
            i
            for i in range(len(datum.roots))
            if datum.pair_rational(pair.nu_bar, i) == 0
        )
        return LeviDescriptor(roots, len(roots) == len(datum.roots))

    def is_rigid(self, pair: NewtonPair) -> bool:
        """Whether the Newton vector is central."""
        return self.levi(pair).full

    def omega_permutation(self, tau: ExtAffElt) -> tuple[int, ...]:
        """``i ↦ j`` with ``Ad(τ)θ(s_i) = s_j``."""
        perm = []
        for i in self.group.affine_indices:
            j = self.group.conjugate_simple(tau, self.twist.affine_perm[i])
            assert j is not None
            perm.append(j)
        return tuple(perm)

    def _check_length_zero(self, tau: ExtAffElt) -> None:
        if (length := self.group.length(tau)) != 0:
            raise PositiveLengthError(self.group.format(tau), length)

    def is_standard_pair(self, subset: Iterable[int], tau: ExtAffElt) -> bool:
        """Whether ``(subset, tau)`` is a standard pair."""
        subset = tuple(sorted(set(subset)))
        if self.group.length(tau) != 0:
            return False
        indices = list(self.group.affine_indices)
        if indices and len(subset) >= len(indices):
            return False
        perm = self.omega_permutation(tau)
        return all(perm[i] in subset for i in subset)

    def standard_pairs(self, tau_list: Iterable[ExtAffElt]) -> list[StandardPair]:
        """All standard pairs with τ from `tau_list`.

        Raises:
            PositiveLengthError: a listed τ is not in Omega.
        """
        pairs = []
        for tau in tau_list:
            self._check_length_zero(tau)
            perm = self.omega_permutation(tau)
            for subset in self.group.proper_subsets():
                if all(perm[i] in subset for i in subset):
                    pairs.append(StandardPair(subset, tau))
        return pairs

    def rigid_cover(self, element: ExtAffElt) -> StandardPair:
        """The standard pair ``(K, τ)`` with ``element ∈ W_K·τ``.

        Raises:
            RigidCoverError: `element` is not minimal, its label is not rigid,
                or the support closure is not of finite type.
        """
        group = self.group
        text = group.format(element)
        if not self.engine.is_minimal(element):
            raise RigidCoverError(f"{text} is not of minimal length")
        if not self.is_rigid(self.engine.pi(element)):
            raise RigidCoverError(f"{text} has a non-central Newton point")
        tau = group.omega_rep_of(element)
        support = set(group.normal_form(element).word)
        perm = self.omega_permutation(tau)
        closure = set(support)
        frontier = list(support)
        while frontier:
            image = perm[frontier.pop()]
            if image not in closure:
                closure.add(image)
                frontier.append(image)
        if len(closure) == len(group.affine_indices) and closure:
            raise RigidCoverError(
                f"support closure of {text} generates an infinite parabolic subgroup"
            )
        return StandardPair(tuple(sorted(closure)), tau)

    def wk_min(self, subset: Iterable[int], tau: ExtAffElt) -> list[ExtAffElt]:
        """``w ∈ W_K`` with ``w·τ`` of minimal length in its ``W_K``-twisted orbit.

        Raises:
            NotStandardPairError: ``(subset, tau)`` is not a standard pair.
        """
        subset = tuple(sorted(set(subset)))
        if not self.is_standard_pair(subset, tau):
            raise NotStandardPairError(subset, self.group.format(tau))
        parabolic = self.group.parabolic_elements(subset)
        result = []
        for w in parabolic:
            product = w * tau
            orbit_min = min(
                self.group.length(self.twist.conjugate(x, product)) for x in parabolic
            )
            if self.group.length(product) == orbit_min:
                result.append(w)
        return result

    def rigid_products(self, tau_list: Iterable[ExtAffElt]) -> list[ExtAffElt]:
        """All products ``w·τ`` from `wk_min` over the standard pairs, ShortLex sorted."""
        products = set()
        for pair in self.standard_pairs(tau_list):
            for w in self.wk_min(pair.subset, pair.tau):
                products.add(w * pair.tau)
        return self.group.sorted(products)

    def double_coset_reps(
        self,
        left: IndexSet | Iterable[int],
        right: IndexSet | Iterable[int],
        bound: int,
        tau_list: Iterable[ExtAffElt],
    ) -> list[ExtAffElt]:
        """Minimal length representatives of ``W_K \\ W̃ / W_K′`` within a ball.

        Raises:
            BoundError: `bound` is negative.
        """
        if bound < 0:
            raise BoundError(bound)
        left, right = frozenset(left), frozenset(right)
        found = set()
        for tau in tau_list:
            for element in self.group.enumerate_coset_ball(tau, bound):
                if left & self.group.descents(element, Side.LEFT):
                    continue
                if right & self.group.descents(element, Side.RIGHT):
                    continue
                found.add(element)
        _logger.debug("%s double coset representatives up to length %s", len(found), bound)
        return self.group.sorted(found)
