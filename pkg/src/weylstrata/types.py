"""Weylstrata shared types."""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import TypeAlias

IntVector: TypeAlias = tuple[int, ...]
IntMatrix: TypeAlias = tuple[IntVector, ...]
RationalVector: TypeAlias = tuple[Fraction, ...]
OmegaCoords: TypeAlias = tuple[int, ...]
IndexSet: TypeAlias = frozenset[int]


class WeylStrataError(Exception):
    """Base class of every error raised by this package.

    The `module` attribute names the module the error originates from and is
    used by the command line interface to qualify its diagnostics.
    """

    module = "weylstrata"


class Side(Enum):
    """Side of a multiplication or descent test."""

    LEFT = "left"
    RIGHT = "right"


class PivotStrategy(Enum):
    """Tie breaking for picking descents during reduction.

    `DEFAULT` takes the smallest simple reflection index and then the
    ShortLex-least element, `REVERSED` takes the largest of both. Both are
    valid reductions; comparing their outcomes checks confluence.
    """

    DEFAULT = "default"
    REVERSED = "reversed"


class OutputFormat(Enum):
    """Report output formats."""

    TEXT = "text"
    STRUCTURED = "structured"
    DOT = "dot"

