"""Rendering of command results as text, JSON or DOT."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from weylstrata.elements import ExtAffElt
from weylstrata.newton import NewtonPair, ReductionEdge
from weylstrata.types import OutputFormat, WeylStrataError
from weylstrata.weyl import ExtendedAffineWeylGroup

_VECTOR = re.compile(r"^\((?P<body>[^()]*)\)$")


class ReportError(WeylStrataError):
    """A report cannot be rendered in the requested format."""

    module = "report"


def format_vector(vector: Sequence[int | Fraction]) -> str:
    """Parenthesized, comma separated coordinates.

    >>> format_vector((Fraction(1, 2), 0))
    '(1/2, 0)'
    """
    return "(" + ", ".join(str(Fraction(c)) for c in vector) + ")"


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Inverse of `format_vector`.

    Raises:
        ReportError: the text is not a parenthesized list of rationals.
    """
    match = _VECTOR.match(text.strip())
    if match is None:
        raise ReportError(f"not a vector: {text!r}")
    body = match["body"].strip()
    if not body:
        return ()
    try:
        return tuple(Fraction(part.strip()) for part in body.split(","))
    except ValueError:
        raise ReportError(f"not a vector: {text!r}") from None


def pair_fields(pair: NewtonPair) -> dict[str, str]:
    """Text fields of a stratum label."""
    return {
        "kappa": format_vector(pair.kappa.coords),
        "nu_bar": format_vector(pair.nu_bar),
    }


@dataclass(frozen=True)
class Graph:
    """A reduction graph on normal forms.

    Edges are ``(source, target, token, drop)``; `drop` marks a length
    decreasing move.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, str, bool], ...]

    @classmethod
    def from_edges(
        cls,
        group: ExtendedAffineWeylGroup,
        edges: Iterable[ReductionEdge],
        extra_nodes: Iterable[ExtAffElt] = (),
    ) -> Graph:
        """Build a graph from reduction edges, nodes in ShortLex order."""
        edges = list(edges)
        elements = set(extra_nodes)
        for edge in edges:
            elements.update((edge.source, edge.target))
        rendered = {
            (
                group.format(e.source),
                group.format(e.target),
                e.token,
                e.length_change < 0,
            )
            for e in edges
        }
        return cls(
            tuple(group.format(e) for e in group.sorted(elements)),
            tuple(sorted(rendered)),
        )


@dataclass(frozen=True)
class Report:
    """Result of one command: ordered fields and an optional graph."""

    command: str
    fields: dict[str, Any]
    graph: Graph | None = field(default=None)


def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    return str(value)


def _text_lines(key: str, value: Any, indent: str) -> list[str]:
    if isinstance(value, dict):
        lines = [f"{indent}{key}:"]
        for sub_key, sub_value in value.items():
            lines.extend(_text_lines(sub_key, sub_value, indent + "  "))
        return lines
    if isinstance(value, list):
        if not value:
            return [f"{indent}{key}: []"]
        lines = [f"{indent}{key}:"]
        for item in value:
            if isinstance(item, dict):
                nested = []
                for sub_key, sub_value in item.items():
                    nested.extend(_text_lines(sub_key, sub_value, indent + "    "))
                nested[0] = f"{indent}  - {nested[0].lstrip()}"
                lines.extend(nested)
            else:
                lines.append(f"{indent}  - {_scalar(item)}")
        return lines
    return [f"{indent}{key}: {_scalar(value)}"]


def render_text(report: Report) -> str:
    """``key: value`` lines; lists become dashed items."""
    lines = []
    for key, value in report.fields.items():
        lines.extend(_text_lines(key, value, ""))
    return "\n".join(lines) + "\n"


def render_structured(report: Report) -> str:
    """JSON with sorted keys."""
    payload = {"command": report.command, **report.fields}
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _quote(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def render_dot(report: Report) -> str:
    """Graphviz digraph; solid edges drop length, dashed edges preserve it.

    Raises:
        ReportError: the command produces no graph.
    """
    if report.graph is None:
        raise ReportError(f"dot output is not available for {report.command}")
    lines = [f"digraph {_quote(report.command)} {{"]
    for node in report.graph.nodes:
        lines.append(f"  {_quote(node)};")
    for source, target, token, drop in report.graph.edges:
        style = "solid" if drop else "dashed"
        lines.append(
            f"  {_quote(source)} -> {_quote(target)} "
            f"[label={_quote(token)}, style={style}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def render(report: Report, output_format: OutputFormat) -> str:
    """Render `report` in `output_format`."""
    match output_format:
        case OutputFormat.TEXT:
            return render_text(report)
        case OutputFormat.STRUCTURED:
            return render_structured(report)
        case OutputFormat.DOT:
            return render_dot(report)
