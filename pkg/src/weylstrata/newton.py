"""Newton invariants, reduction to minimal length and Newton fibers.

Every class of θ-twisted conjugation ``w ↦ x·w·θ(x)⁻¹`` carries the pair
``π(w) = (κ(w), ν̄_w)``. Reduction walks a class down to its minimal length
elements using the moves ``w ↦ s·w·θ(s)`` for simple affine reflections ``s``
and ``w ↦ τ·w·θ(τ)⁻¹`` for Omega generators ``τ``.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from weylstrata.elements import ExtAffElt
from weylstrata.root_datum import AffineRoot, dominant_rep
from weylstrata.twist import Twist
from weylstrata.types import (
    IntVector,
    OmegaCoords,
    PivotStrategy,
    RationalVector,
    Side,
    WeylStrataError,
)
from weylstrata.weyl import ExtendedAffineWeylGroup

_logger = logging.getLogger(__name__)


class NotMinimalError(WeylStrataError):
    """An operation needing a minimal length element got a longer one."""

    module = "newton"

    def __init__(self, text: str, length: int, minimum: int) -> None:
        """Init.

        Args:
            text: Normal form of the element.
            length: Its length.
            minimum: Minimal length in its class.
        """
        self.text = text
        super().__init__(
            f"{text} has length {length} but its class reaches length {minimum}"
        )


@dataclass(frozen=True, order=True)
class KottwitzClass:
    """Coordinates in the coinvariants ``Ω_θ``."""

    coords: OmegaCoords


@dataclass(frozen=True, order=True)
class NewtonPair:
    """The stratum label ``(κ, ν̄)``."""

    kappa: KottwitzClass
    nu_bar: RationalVector


@dataclass(frozen=True)
class NewtonPoint:
    """Newton vector of an element.

    ``(wθ)^witness_power`` is the translation by ``witness_power · nu``.
    """

    nu: RationalVector
    nu_bar: RationalVector
    witness_power: int


@dataclass(frozen=True)
class MoveStep:
    """One reduction move: its token (``s<i>`` or an Omega label) and length change."""

    token: str
    length_change: int


@dataclass(frozen=True)
class ReductionEdge:
    """A move between two elements met during reduction."""

    source: ExtAffElt
    target: ExtAffElt
    token: str
    length_change: int


@dataclass(frozen=True)
class Descent:
    """A length decreasing move ``s·w′·θ(s)`` from ``w′ ≈ w``."""

    source: ExtAffElt
    generator: int
    path: tuple[MoveStep, ...]
    target: ExtAffElt


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of `NewtonEngine.reduce_to_min`."""

    element: ExtAffElt
    minimal_element: ExtAffElt
    path: tuple[MoveStep, ...]
    class_label: ExtAffElt
    edges: tuple[ReductionEdge, ...] = ()


@dataclass(frozen=True)
class FiberClass:
    """Minimal length elements of one class inside a Newton fiber."""

    label: ExtAffElt
    elements: tuple[ExtAffElt, ...]
    straight: bool


@dataclass(frozen=True)
class FiberReport:
    """All minimal length elements over one stratum label."""

    pair: NewtonPair
    bound: int
    classes: tuple[FiberClass, ...]

    @property
    def count(self) -> int:
        """``N_ν``, the number of minimal length elements in the fiber."""
        return sum(len(c.elements) for c in self.classes)

    @property
    def elements(self) -> frozenset[ExtAffElt]:
        """Union of the minimal sets of all classes."""
        return frozenset(e for c in self.classes for e in c.elements)


@dataclass(frozen=True)
class StandardTriple:
    """Straight ``x``, a θ-stable finite type subset ``K`` and ``u ∈ W_K``."""

    x: ExtAffElt
    subset: tuple[int, ...]
    u: ExtAffElt

    @property
    def product(self) -> ExtAffElt:
        """The minimal length element ``u·x``."""
        return self.u * self.x


@dataclass
class _Closure:
    members: dict[ExtAffElt, tuple[ExtAffElt, str] | None]
    edges: list[ReductionEdge]
    drops: list[tuple[int, ExtAffElt, str, ExtAffElt]]

    def path_to(self, member: ExtAffElt) -> list[MoveStep]:
        steps = []
        while (parent := self.members[member]) is not None:
            member, token = parent
            steps.append(MoveStep(token, 0))
        return steps[::-1]


def n_max(group: ExtendedAffineWeylGroup) -> int:
    """Largest length of the longest element of a finite ``W_K``.

    Counts the positive affine roots of the root subsystem spanned by each
    maximal proper subset ``K`` of the simple affine roots.
    """
    indices = list(group.affine_indices)
    best = 0
    for skipped in indices:
        subset = [i for i in indices if i != skipped]
        generators = [group.simple_reflection(i) for i in subset]
        start = [group.affine_simple_root(i) for i in subset]
        seen: set[AffineRoot] = set(start)
        queue = deque(start)
        while queue:
            root = queue.popleft()
            for generator in generators:
                image = group.apply(generator, root)
                if image not in seen:
                    seen.add(image)
                    queue.append(image)
        best = max(best, sum(1 for r in seen if r.is_positive(group.datum)))
    return best


class NewtonEngine:
    """Newton invariants and reductions for a fixed twist.

    Reductions and class searches are memoized per engine.
    """

    def __init__(self, twist: Twist, excursion: int | None = None) -> None:
        """Init.

        Args:
            twist: The twist θ.
            excursion: How far above the minimal length a class search may
                travel. Defaults to twice `n_max`.
        """
        self.twist = twist
        self.group = twist.group
        self.datum = twist.group.datum
        self.n_max = n_max(self.group)
        self.excursion = 2 * self.n_max if excursion is None else excursion
        self._omega_moves = [
            (self.group.format(tau), tau) for tau in self.group.omega_generator_reps()
        ]
        self._reductions: dict[tuple[ExtAffElt, PivotStrategy], ReductionResult] = {}
        self._class_sets: dict[ExtAffElt, frozenset[ExtAffElt]] = {}
        self._pairs: dict[ExtAffElt, NewtonPair] = {}

    # invariants

    def kappa(self, element: ExtAffElt) -> KottwitzClass:
        """Image of `element` in ``Ω_θ``."""
        return KottwitzClass(self.twist.kappa(element))

    def twisted_product(self, element: ExtAffElt, power: int) -> ExtAffElt:
        """The factor ``w·θ(w)···θ^{power-1}(w)`` of ``(wθ)^power``."""
        result = self.group.identity
        for _ in range(power):
            result = result * element
            element = self.twist.apply(element)
        return result

    def translation_power(self, element: ExtAffElt, power: int) -> IntVector | None:
        """``μ`` with ``(wθ)^power = t^μ``, `None` if it is not a translation."""
        if power % self.twist.order:
            return None
        product = self.twisted_product(element, power)
        return product.translation if product.is_translation else None

    def newton_point(self, element: ExtAffElt) -> NewtonPoint:
        """Newton vector ``ν_w = μ/n`` for the least ``n`` with ``(wθ)^n = t^μ``.

        ``(wθ)^n`` is a translation only when θ^n is trivial, so ``n`` runs
        over multiples of the order of θ.
        """
        order = self.twist.order
        base = self.twisted_product(element, order)
        product, power = base, order
        while not product.is_translation:
            product = product * base
            power += order
        nu = tuple(Fraction(c, power) for c in product.translation)
        nu_bar, _ = dominant_rep(self.datum, nu)
        return NewtonPoint(nu, nu_bar, power)

    def pi(self, element: ExtAffElt) -> NewtonPair:
        """The stratum label ``(κ(w), ν̄_w)``."""
        cached = self._pairs.get(element)
        if cached is None:
            cached = NewtonPair(self.kappa(element), self.newton_point(element).nu_bar)
            self._pairs[element] = cached
        return cached

    def straight_length(self, pair: NewtonPair) -> Fraction:
        """``⟨ν̄, 2ρ⟩``, the length of the straight elements over `pair`."""
        return self.datum.two_rho_pairing(pair.nu_bar)

    def is_straight(self, element: ExtAffElt) -> bool:
        """Whether ``ℓ(w) = ⟨ν̄_w, 2ρ⟩``."""
        return self.group.length(element) == self.straight_length(self.pi(element))

    # moves

    def moves(self, element: ExtAffElt) -> Iterator[tuple[int, str, ExtAffElt]]:
        """Twisted conjugations by simple reflections, then by Omega generators.

        Yields:
            Tie break index, token and the conjugated element.
        """
        group = self.group
        for i in group.affine_indices:
            yield (
                i,
                f"s{i}",
                group.simple_reflection(i)
                * element
                * group.simple_reflection(self.twist.affine_perm[i]),
            )
        offset = len(group.affine_indices)
        for k, (token, tau) in enumerate(self._omega_moves):
            yield offset + k, token, self.twist.conjugate(tau, element)

    def _explore(self, element: ExtAffElt) -> _Closure:
        """The ≈-closure of `element` together with its length dropping moves."""
        length = self.group.length(element)
        closure = _Closure({element: None}, [], [])
        queue = deque([element])
        while queue:
            current = queue.popleft()
            for index, token, neighbor in self.moves(current):
                change = self.group.length(neighbor) - length
                if change < 0:
                    closure.drops.append((index, current, token, neighbor))
                    closure.edges.append(ReductionEdge(current, neighbor, token, change))
                elif change == 0 and neighbor != current:
                    closure.edges.append(ReductionEdge(current, neighbor, token, 0))
                    if neighbor not in closure.members:
                        closure.members[neighbor] = (current, token)
                        queue.append(neighbor)
        return closure

    def _pick(
        self, closure: _Closure, strategy: PivotStrategy
    ) -> tuple[int, ExtAffElt, str, ExtAffElt]:
        def key(drop: tuple[int, ExtAffElt, str, ExtAffElt]) -> tuple:
            return (drop[0], self.group.shortlex_key(drop[1]))

        if strategy is PivotStrategy.REVERSED:
            return max(closure.drops, key=key)
        return min(closure.drops, key=key)

    def find_descent(
        self, element: ExtAffElt, strategy: PivotStrategy = PivotStrategy.DEFAULT
    ) -> Descent | None:
        """A length decreasing move reachable by length preserving moves.

        Returns:
            `None` when the ≈-closure of `element` admits no decreasing move.
        """
        closure = self._explore(element)
        if not closure.drops:
            return None
        index, source, _, target = self._pick(closure, strategy)
        return Descent(source, index, tuple(closure.path_to(source)), target)

    def reduce_to_min(
        self, element: ExtAffElt, strategy: PivotStrategy = PivotStrategy.DEFAULT
    ) -> ReductionResult:
        """Reduce `element` to a minimal length element of its class."""
        cached = self._reductions.get((element, strategy))
        if cached is not None:
            return cached
        current = element
        path: list[MoveStep] = []
        edges: list[ReductionEdge] = []
        while True:
            closure = self._explore(current)
            edges.extend(closure.edges)
            if not closure.drops:
                break
            _, source, token, target = self._pick(closure, strategy)
            change = self.group.length(target) - self.group.length(source)
            path.extend(closure.path_to(source))
            path.append(MoveStep(token, change))
            _logger.debug(
                "reduction step %s: %s -> %s",
                token,
                self.group.format(source),
                self.group.format(target),
            )
            current = target
        result = ReductionResult(
            element=element,
            minimal_element=current,
            path=tuple(path),
            class_label=self._label_of_minimal(current),
            edges=tuple(dict.fromkeys(edges)),
        )
        self._reductions[(element, strategy)] = result
        return result

    def is_minimal(self, element: ExtAffElt) -> bool:
        """Whether `element` has minimal length in its class."""
        reached = self.reduce_to_min(element).minimal_element
        return self.group.length(reached) == self.group.length(element)

    def _require_minimal(self, element: ExtAffElt) -> None:
        reached = self.reduce_to_min(element).minimal_element
        minimum = self.group.length(reached)
        length = self.group.length(element)
        if minimum < length:
            raise NotMinimalError(self.group.format(element), length, minimum)

    def min_closure(self, element: ExtAffElt) -> frozenset[ExtAffElt]:
        """All elements reachable from a minimal `element` by length preserving moves.

        Raises:
            NotMinimalError: `element` is not of minimal length.
        """
        self._require_minimal(element)
        return frozenset(self._explore(element).members)

    def class_min_set(self, element: ExtAffElt) -> frozenset[ExtAffElt]:
        """Minimal length conjugates reachable through bounded excursions.

        Searches twisted conjugates through elements of length at most
        ``ℓ(element) + excursion``.

        Raises:
            NotMinimalError: `element` is not of minimal length.
        """
        if element not in self._class_sets:
            self._require_minimal(element)
        return self._search_class(element)

    def _search_class(self, element: ExtAffElt) -> frozenset[ExtAffElt]:
        cached = self._class_sets.get(element)
        if cached is not None:
            return cached
        length = self.group.length(element)
        limit = length + self.excursion
        seen = {element}
        minimal = {element}
        queue = deque([element])
        while queue:
            current = queue.popleft()
            for _, _, neighbor in self.moves(current):
                if neighbor in seen:
                    continue
                neighbor_length = self.group.length(neighbor)
                if neighbor_length > limit:
                    continue
                if neighbor_length < length:
                    raise NotMinimalError(
                        self.group.format(element), length, neighbor_length
                    )
                seen.add(neighbor)
                queue.append(neighbor)
                if neighbor_length == length:
                    minimal.add(neighbor)
        result = frozenset(minimal)
        _logger.debug(
            "class of %s: %s minimal elements among %s searched",
            self.group.format(element),
            len(result),
            len(seen),
        )
        for member in result:
            self._class_sets[member] = result
        return result

    def _label_of_minimal(self, element: ExtAffElt) -> ExtAffElt:
        return self.group.sorted(self._search_class(element))[0]

    def class_label(self, element: ExtAffElt) -> ExtAffElt:
        """ShortLex-least known minimal element of the class of `element`."""
        return self.reduce_to_min(element).class_label

    # fibers

    def fiber_cosets(self, element: ExtAffElt) -> list[OmegaCoords]:
        """Omega-cosets sharing the Kottwitz class of `element` up to torsion."""
        quotient = self.group.omega.quotient
        relations = [
            r for r in self.twist.coinvariant_relations() if quotient.is_torsion(r)
        ]
        base = self.group.omega_coset(element)
        return sorted({quotient.add(base, h) for h in quotient.subgroup(relations)})

    def fiber_min(self, seed: ExtAffElt) -> FiberReport:
        """All minimal length elements ``w`` with ``π(w) = π(seed)``, grouped by class."""
        pair = self.pi(seed)
        seed_min = self.reduce_to_min(seed).minimal_element
        bound = math.ceil(self.straight_length(pair)) + self.n_max
        members: dict[ExtAffElt, list[ExtAffElt]] = defaultdict(list)
        for coords in self.fiber_cosets(seed_min):
            tau = self.group.omega_rep(coords)
            for element in self.group.enumerate_coset_ball(tau, bound):
                if self.pi(element) != pair or not self.is_minimal(element):
                    continue
                members[self.class_label(element)].append(element)
        classes = tuple(
            FiberClass(
                label=label,
                elements=tuple(self.group.sorted(members[label])),
                straight=self.is_straight(label),
            )
            for label in self.group.sorted(members)
        )
        report = FiberReport(pair, bound, classes)
        _logger.debug(
            "fiber over %s: %s classes, %s minimal elements",
            pair,
            len(classes),
            report.count,
        )
        return report

    def stabilizes(self, element: ExtAffElt, subset: tuple[int, ...]) -> bool:
        """Whether ``Ad(element) ∘ θ`` maps the simple reflections in `subset` into it."""
        for i in subset:
            image = self.group.conjugate_simple(element, self.twist.affine_perm[i])
            if image is None or image not in subset:
                return False
        return True

    def standard_triples(self, seed: ExtAffElt) -> list[StandardTriple]:
        """Standard triples ``(x, K, u)`` over the stratum of `seed`.

        One triple is kept per product ``u·x``, the one with the smallest ``K``.
        Every class of the fiber contains a product, but a class can have
        minimal elements that are no product.
        """
        fiber = self.fiber_min(seed)
        straight = [e for c in fiber.classes if c.straight for e in c.elements]
        triples: list[StandardTriple] = []
        products: set[ExtAffElt] = set()
        for subset in self.group.proper_subsets():
            parabolic: list[ExtAffElt] | None = None
            for x in straight:
                if set(subset) & self.group.descents(x, Side.LEFT):
                    continue
                if not self.stabilizes(x, subset):
                    continue
                if parabolic is None:
                    parabolic = self.group.parabolic_elements(subset)
                for u in parabolic:
                    product = u * x
                    if product in products:
                        continue
                    if self.pi(product) != fiber.pair or not self.is_minimal(product):
                        continue
                    products.add(product)
                    triples.append(StandardTriple(x, subset, u))
        return triples

    # strata

    def stratum_cover(self, element: ExtAffElt) -> list[NewtonPair]:
        """Stratum labels of the leaves of the reduction tree of `element`."""
        labels = set()
        visited = set()
        stack = [element]
        while stack:
            current = stack.pop()
            if current in visited:
                continue
            visited.add(current)
            descent = self.find_descent(current)
            if descent is None:
                labels.add(self.pi(current))
                continue
            stack.append(self.group.simple_reflection(descent.generator) * descent.source)
            stack.append(descent.target)
        return sorted(labels)

    def stratify_ball(self, tau: ExtAffElt, bound: int) -> dict[NewtonPair, int]:
        """Number of elements of the coset ball of `tau` over each stratum label."""
        counts: dict[NewtonPair, int] = defaultdict(int)
        for element in self.group.enumerate_coset_ball(tau, bound):
            counts[self.pi(element)] += 1
        return dict(sorted(counts.items()))
