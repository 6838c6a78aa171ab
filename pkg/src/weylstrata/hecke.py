"""Generic Iwahori–Hecke algebra of W̃ and its θ-twisted cocenter.

Coefficients are integer polynomials in the parameter ``q``. The basis
``{T_w}`` multiplies by ``T_x T_y = T_{xy}`` when lengths add and
``T_s² = (q - 1) T_s + q T_e``.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TypeAlias

from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.domains import ZZ
from sympy.polys.rings import PolyElement, ring

from weylstrata.elements import ExtAffElt
from weylstrata.newton import NewtonEngine, NewtonPair
from weylstrata.types import PivotStrategy, WeylStrataError
from weylstrata.weyl import ExtendedAffineWeylGroup

_logger = logging.getLogger(__name__)

PARAM_RING, Q = ring("q", ZZ)
ParamPoly: TypeAlias = PolyElement


class PolynomialSyntaxError(WeylStrataError):
    """A coefficient polynomial could not be parsed."""

    module = "hecke"

    def __init__(self, text: str) -> None:
        """Init.

        Args:
            text: The rejected text.
        """
        self.text = text
        super().__init__(f"not an integer polynomial in q: {text!r}")


def format_poly(poly: ParamPoly) -> str:
    """Ascending degree text form, parenthesized when it has several terms.

    >>> format_poly(Q - 1)
    '(-1 + q)'
    >>> format_poly(2 * Q**2)
    '2*q^2'
    """
    terms = sorted((monom[0], int(coeff)) for monom, coeff in poly.terms())
    if not terms:
        return "0"
    parts = []
    for degree, coeff in terms:
        if degree == 0:
            text = str(abs(coeff))
        else:
            power = "q" if degree == 1 else f"q^{degree}"
            text = power if abs(coeff) == 1 else f"{abs(coeff)}*{power}"
        if not parts:
            parts.append(text if coeff > 0 else f"-{text}")
        else:
            parts.append(f"+ {text}" if coeff > 0 else f"- {text}")
    joined = " ".join(parts)
    return f"({joined})" if len(terms) > 1 else joined


def parse_poly(text: str) -> ParamPoly:
    """Inverse of `format_poly`.

    Raises:
        PolynomialSyntaxError: not an integer polynomial in ``q``.
    """
    try:
        expr = parse_expr(text.replace("^", "**"))
        return PARAM_RING.from_expr(expr)
    except Exception as err:  # sympy raises a variety of errors here
        raise PolynomialSyntaxError(text) from err


def _accumulate(
    terms: dict[ExtAffElt, ParamPoly], key: ExtAffElt, value: ParamPoly
) -> None:
    total = terms.get(key, PARAM_RING.zero) + value
    if total:
        terms[key] = total
    else:
        terms.pop(key, None)


@dataclass(frozen=True)
class HeckeElt:
    """Finitely supported map ``W̃ → Z[q]``; zero coefficients are never stored."""

    terms: Mapping[ExtAffElt, ParamPoly] = field(default_factory=dict)

    def coefficient(self, element: ExtAffElt) -> ParamPoly:
        """Coefficient of ``T_element``."""
        return self.terms.get(element, PARAM_RING.zero)

    def __add__(self, other: HeckeElt) -> HeckeElt:
        terms = dict(self.terms)
        for key, value in other.terms.items():
            _accumulate(terms, key, value)
        return HeckeElt(terms)

    def scale(self, factor: ParamPoly | int) -> HeckeElt:
        """Multiply every coefficient by `factor`."""
        terms: dict[ExtAffElt, ParamPoly] = {}
        for key, value in self.terms.items():
            _accumulate(terms, key, value * factor)
        return HeckeElt(terms)


@dataclass(frozen=True)
class CocenterVector:
    """Finitely supported map from class labels to ``Z[q]``."""

    terms: Mapping[ExtAffElt, ParamPoly] = field(default_factory=dict)

    def __add__(self, other: CocenterVector) -> CocenterVector:
        terms = dict(self.terms)
        for key, value in other.terms.items():
            _accumulate(terms, key, value)
        return CocenterVector(terms)

    def __sub__(self, other: CocenterVector) -> CocenterVector:
        terms = dict(self.terms)
        for key, value in other.terms.items():
            _accumulate(terms, key, -value)
        return CocenterVector(terms)

    def __bool__(self) -> bool:
        return bool(self.terms)


@dataclass(frozen=True)
class TraceCheck:
    """Result of `TwistedCocenter.trace_check`."""

    holds: bool
    discrepancy: CocenterVector


class HeckeAlgebra:
    """The Iwahori–Hecke algebra with generic parameter."""

    def __init__(self, group: ExtendedAffineWeylGroup) -> None:
        """Init.

        Args:
            group: The extended affine Weyl group indexing the basis.
        """
        self.group = group

    def basis(self, element: ExtAffElt) -> HeckeElt:
        """The basis element ``T_element``."""
        return HeckeElt({element: PARAM_RING.one})

    def identity(self) -> HeckeElt:
        """The unit ``T_e``."""
        return self.basis(self.group.identity)

    def _times_generator(
        self, terms: Mapping[ExtAffElt, ParamPoly], i: int
    ) -> dict[ExtAffElt, ParamPoly]:
        """Right multiplication by ``T_{s_i}``."""
        generator = self.group.simple_reflection(i)
        result: dict[ExtAffElt, ParamPoly] = {}
        for element, coeff in terms.items():
            product = element * generator
            if self.group.length(product) > self.group.length(element):
                _accumulate(result, product, coeff)
            else:
                _accumulate(result, element, coeff * (Q - 1))
                _accumulate(result, product, coeff * Q)
        return result

    def mul(self, first: HeckeElt, second: HeckeElt) -> HeckeElt:
        """Product, factoring each right basis element into generators."""
        result: dict[ExtAffElt, ParamPoly] = {}
        for right, right_coeff in second.terms.items():
            form = self.group.normal_form(right)
            omega_part = self.group.omega_rep_of(right)
            partial: dict[ExtAffElt, ParamPoly] = dict(first.terms)
            for i in form.word:
                partial = self._times_generator(partial, i)
            for element, coeff in partial.items():
                _accumulate(result, element * omega_part, coeff * right_coeff)
        return HeckeElt(result)


class TwistedCocenter:
    """The θ-twisted cocenter, spanned by classes of minimal length elements."""

    def __init__(self, engine: NewtonEngine, algebra: HeckeAlgebra | None = None) -> None:
        """Init.

        Args:
            engine: Newton engine of the twist.
            algebra: The Hecke algebra; built from the engine's group if omitted.
        """
        self.engine = engine
        self.group = engine.group
        self.algebra = algebra or HeckeAlgebra(engine.group)

    def reduce(
        self, element: HeckeElt, strategy: PivotStrategy = PivotStrategy.DEFAULT
    ) -> CocenterVector:
        """Rewrite into minimal classes.

        Takes a longest non-minimal basis element ``T_w``, moves it along
        ``T_w ≡ T_{w′}`` for ``w′ ≈ w`` and expands
        ``T_{w′} ≡ (q - 1) T_{s·w′} + q T_{s·w′·θ(s)}``.
        """
        pending: dict[ExtAffElt, ParamPoly] = dict(element.terms)
        result: dict[ExtAffElt, ParamPoly] = {}
        reverse = strategy is PivotStrategy.REVERSED
        while pending:
            longest = max(self.group.length(w) for w in pending)
            candidates = self.group.sorted(
                w for w in pending if self.group.length(w) == longest
            )
            pivot = candidates[-1] if reverse else candidates[0]
            coeff = pending.pop(pivot)
            descent = self.engine.find_descent(pivot, strategy)
            if descent is None:
                _accumulate(result, self.engine.class_label(pivot), coeff)
                continue
            shorter = self.group.simple_reflection(descent.generator) * descent.source
            _accumulate(pending, shorter, coeff * (Q - 1))
            _accumulate(pending, descent.target, coeff * Q)
        return CocenterVector(result)

    def reduce_basis(
        self, element: ExtAffElt, strategy: PivotStrategy = PivotStrategy.DEFAULT
    ) -> CocenterVector:
        """Image of ``T_element`` in the cocenter."""
        return self.reduce(self.algebra.basis(element), strategy)

    def newton_grade(self, vector: CocenterVector) -> dict[NewtonPair, CocenterVector]:
        """Split a cocenter vector by the stratum labels of its classes."""
        parts: dict[NewtonPair, dict[ExtAffElt, ParamPoly]] = defaultdict(dict)
        for label, coeff in vector.terms.items():
            parts[self.engine.pi(label)][label] = coeff
        return {pair: CocenterVector(parts[pair]) for pair in sorted(parts)}

    def trace_check(self, x: ExtAffElt, y: ExtAffElt) -> TraceCheck:
        """Compare the images of ``T_x T_y`` and ``T_y T_{θ(x)}``."""
        algebra = self.algebra
        left = self.reduce(algebra.mul(algebra.basis(x), algebra.basis(y)))
        right = self.reduce(
            algebra.mul(algebra.basis(y), algebra.basis(self.engine.twist.apply(x)))
        )
        discrepancy = left - right
        if discrepancy:
            _logger.debug(
                "trace relation fails for %s, %s",
                self.group.format(x),
                self.group.format(y),
            )
        return TraceCheck(not discrepancy, discrepancy)

    def specialize(self, vector: CocenterVector, value: int) -> dict[ExtAffElt, int]:
        """Evaluate every coefficient at ``q = value``."""
        return {label: int(coeff(value)) for label, coeff in vector.terms.items()}

    def labels(self, vector: CocenterVector) -> list[ExtAffElt]:
        """Support of `vector` in ShortLex order."""
        return self.group.sorted(vector.terms)

    def format(self, vector: CocenterVector) -> list[str]:
        """One ``coeff * [label]`` line per class, in ShortLex order."""
        return [
            f"{format_poly(vector.terms[label])} * [{self.group.format(label)}]"
            for label in self.labels(vector)
        ]

    def parse(self, lines: Iterable[str]) -> CocenterVector:
        """Inverse of `format`."""
        terms: dict[ExtAffElt, ParamPoly] = {}
        for line in lines:
            if not line.strip():
                continue
            coeff_text, _, label_text = line.rpartition(" * [")
            label = self.group.parse(label_text.rstrip().removesuffix("]"))
            _accumulate(terms, label, parse_poly(coeff_text))
        return CocenterVector(terms)
