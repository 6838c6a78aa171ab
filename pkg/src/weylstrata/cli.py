"""Command line interface.

Every subcommand reads one session file (``--datum``) and takes elements in
the token syntax, e.g. ``--element "s0 s1"``. Reports are rendered completely
before anything is printed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

from weylstrata.config import Session, build_session, load_config
from weylstrata.elements import ExtAffElt
from weylstrata.newton import n_max
from weylstrata.oracle import generate_fixtures
from weylstrata.report import Graph, Report, format_vector, pair_fields, render
from weylstrata.rigid import StandardPair
from weylstrata.types import OutputFormat, PivotStrategy, WeylStrataError
from weylstrata.weyl import UnknownTokenError

_logger = logging.getLogger(__name__)

Handler = Callable[[Session, argparse.Namespace], Report]


def _element(session: Session, text: str) -> ExtAffElt:
    return session.group.parse(text)


def _indices(session: Session, indices: Sequence[int]) -> tuple[int, ...]:
    for i in indices:
        if i not in session.group.affine_indices:
            raise UnknownTokenError(f"s{i}")
    return tuple(sorted(set(indices)))


def _tau_list(session: Session, tokens: Sequence[str] | None) -> list[ExtAffElt]:
    """Explicit Omega elements, or every torsion element of Omega."""
    if not tokens:
        return session.group.torsion_omega_reps()
    return [_element(session, token) for token in tokens]


def _bound(session: Session, args: argparse.Namespace) -> int:
    return session.config.bounds.ball_radius if args.bound is None else args.bound


def _pair_entry(session: Session, pair: StandardPair) -> dict[str, object]:
    return {"K": list(pair.subset), "tau": session.group.format(pair.tau)}


def cmd_classify(session: Session, args: argparse.Namespace) -> Report:
    """Invariants of one element."""
    engine, group = session.engine, session.group
    element = _element(session, args.element)
    point = engine.newton_point(element)
    pair = engine.pi(element)
    return Report(
        "classify",
        {
            "element": group.format(element),
            "length": group.length(element),
            **pair_fields(pair),
            "nu": format_vector(point.nu),
            "witness_power": point.witness_power,
            "straight": engine.is_straight(element),
            "minimal": engine.is_minimal(element),
            "class_label": group.format(engine.class_label(element)),
        },
    )


def cmd_reduce(session: Session, args: argparse.Namespace) -> Report:
    """Reduction path to a minimal length element."""
    group = session.group
    element = _element(session, args.element)
    result = session.engine.reduce_to_min(element, PivotStrategy(args.pivot))
    return Report(
        "reduce",
        {
            "element": group.format(element),
            "minimal_element": group.format(result.minimal_element),
            "class_label": group.format(result.class_label),
            "path": [
                {"token": step.token, "length_change": step.length_change}
                for step in result.path
            ],
        },
        Graph.from_edges(group, result.edges, [element, result.minimal_element]),
    )


def cmd_fiber(session: Session, args: argparse.Namespace) -> Report:
    """Minimal length elements over the stratum of an element."""
    engine, group = session.engine, session.group
    report = engine.fiber_min(_element(session, args.element))
    edges = [
        edge
        for e in sorted(report.elements, key=group.shortlex_key)
        for edge in engine.reduce_to_min(e).edges
    ]
    return Report(
        "fiber",
        {
            **pair_fields(report.pair),
            "bound": report.bound,
            "N_nu": report.count,
            "classes": [
                {
                    "label": group.format(c.label),
                    "straight": c.straight,
                    "minimal_elements": [group.format(e) for e in c.elements],
                }
                for c in report.classes
            ],
        },
        Graph.from_edges(group, edges, report.elements),
    )


def cmd_triples(session: Session, args: argparse.Namespace) -> Report:
    """Standard triples over the stratum of an element."""
    group = session.group
    triples = session.engine.standard_triples(_element(session, args.element))
    return Report(
        "triples",
        {
            "triples": [
                {
                    "x": group.format(t.x),
                    "K": list(t.subset),
                    "u": group.format(t.u),
                    "product": group.format(t.product),
                }
                for t in triples
            ]
        },
    )


def cmd_cocenter(session: Session, args: argparse.Namespace) -> Report:
    """Image of ``T_w`` in the twisted cocenter."""
    cocenter = session.cocenter
    element = _element(session, args.element)
    vector = cocenter.reduce_basis(element, PivotStrategy(args.pivot))
    fields: dict[str, object] = {
        "element": session.group.format(element),
        "terms": cocenter.format(vector),
    }
    if args.q is not None:
        values = cocenter.specialize(vector, args.q)
        fields["specialized"] = {
            session.group.format(label): values[label]
            for label in cocenter.labels(vector)
        }
    return Report("cocenter", fields)


def cmd_grade(session: Session, args: argparse.Namespace) -> Report:
    """Cocenter image of ``T_w`` split by stratum label."""
    cocenter = session.cocenter
    element = _element(session, args.element)
    graded = cocenter.newton_grade(cocenter.reduce_basis(element))
    return Report(
        "grade",
        {
            "element": session.group.format(element),
            "components": [
                {**pair_fields(pair), "terms": cocenter.format(part)}
                for pair, part in graded.items()
            ],
        },
    )


def cmd_trace_check(session: Session, args: argparse.Namespace) -> Report:
    """Compare the cocenter images of ``T_x T_y`` and ``T_y T_θ(x)``."""
    group = session.group
    x = _element(session, args.element)
    y = _element(session, args.other)
    check = session.cocenter.trace_check(x, y)
    return Report(
        "trace-check",
        {
            "x": group.format(x),
            "y": group.format(y),
            "holds": check.holds,
            "discrepancy": session.cocenter.format(check.discrepancy),
        },
    )


def cmd_rigid_pairs(session: Session, args: argparse.Namespace) -> Report:
    """Standard pairs and the minimal products they cover."""
    group, rigid = session.group, session.rigid
    taus = _tau_list(session, args.tau)
    return Report(
        "rigid-pairs",
        {
            "pairs": [_pair_entry(session, p) for p in rigid.standard_pairs(taus)],
            "products": [group.format(e) for e in rigid.rigid_products(taus)],
        },
    )


def cmd_rigid_cover(session: Session, args: argparse.Namespace) -> Report:
    """Standard pair covering each given rigid minimal element."""
    group = session.group
    elements = group.sorted({_element(session, text) for text in args.element})
    return Report(
        "rigid-cover",
        {
            "covers": [
                {
                    "element": group.format(e),
                    "pair": _pair_entry(session, session.rigid.rigid_cover(e)),
                }
                for e in elements
            ]
        },
    )


def cmd_dcosets(session: Session, args: argparse.Namespace) -> Report:
    """Minimal double coset representatives within a ball."""
    group = session.group
    reps = session.rigid.double_coset_reps(
        _indices(session, args.left),
        _indices(session, args.right),
        _bound(session, args),
        _tau_list(session, args.tau),
    )
    return Report("dcosets", {"reps": [group.format(e) for e in reps]})


def cmd_nmax(session: Session, args: argparse.Namespace) -> Report:
    """Largest finite parabolic length."""
    return Report("nmax", {"n_max": n_max(session.group)})


def cmd_strata(session: Session, args: argparse.Namespace) -> Report:
    """Stratum labels met in a coset ball, with multiplicities."""
    tau = _element(session, args.tau or "")
    counts = session.engine.stratify_ball(tau, _bound(session, args))
    return Report(
        "strata",
        {
            "tau": session.group.format(tau),
            "strata": [{**pair_fields(pair), "count": n} for pair, n in counts.items()],
        },
    )


def cmd_fixtures(session: Session, args: argparse.Namespace) -> Report:
    """Write oracle golden data as JSON."""
    radius = _bound(session, args)
    depth = session.config.bounds.conjugator_depth if args.depth is None else args.depth
    data = generate_fixtures(session.twist, radius, depth)
    output = Path(args.output)
    output.write_text(
        json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return Report(
        "fixtures",
        {
            "output": str(output),
            "radius": radius,
            "elements": len(data["elements"]),
            "products": len(data["products"]),
            "double_cosets": len(data["double_cosets"]),
        },
    )


def _add_command(
    subparsers: argparse._SubParsersAction[argparse.ArgumentParser],
    name: str,
    handler: Handler,
    *,
    element: bool = False,
    bound: bool = False,
    tau: bool = False,
    pivot: bool = False,
) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(name, help=handler.__doc__)
    parser.add_argument("--datum", required=True, help="session file (TOML)")
    parser.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        help="output format; defaults to the session file",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging to stderr")
    if element:
        parser.add_argument("--element", required=True, help='element, e.g. "s0 s1"')
    if bound:
        parser.add_argument("--bound", type=int, help="length bound of the ball")
    if tau:
        parser.add_argument(
            "--tau", action="append", help="Omega element; repeat for several"
        )
    if pivot:
        parser.add_argument(
            "--pivot",
            choices=[s.value for s in PivotStrategy],
            default=PivotStrategy.DEFAULT.value,
            help="tie breaking during reduction",
        )
    parser.set_defaults(handler=handler)
    return parser


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per computation."""
    parser = argparse.ArgumentParser(
        prog="weylstrata",
        description="Newton strata and twisted cocenters of extended affine Weyl groups.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_command(subparsers, "classify", cmd_classify, element=True)
    _add_command(subparsers, "reduce", cmd_reduce, element=True, pivot=True)
    _add_command(subparsers, "fiber", cmd_fiber, element=True)
    _add_command(subparsers, "triples", cmd_triples, element=True)
    cocenter = _add_command(subparsers, "cocenter", cmd_cocenter, element=True, pivot=True)
    cocenter.add_argument("--q", type=int, help="also evaluate at this value of q")
    _add_command(subparsers, "grade", cmd_grade, element=True)
    trace = _add_command(subparsers, "trace-check", cmd_trace_check, element=True)
    trace.add_argument("--other", required=True, help="the second element y")
    _add_command(subparsers, "rigid-pairs", cmd_rigid_pairs, tau=True)
    cover = _add_command(subparsers, "rigid-cover", cmd_rigid_cover)
    cover.add_argument(
        "--element", action="append", required=True, help="repeat for several"
    )
    dcosets = _add_command(subparsers, "dcosets", cmd_dcosets, bound=True, tau=True)
    dcosets.add_argument("--left", type=int, nargs="*", default=[], help="indices of K")
    dcosets.add_argument("--right", type=int, nargs="*", default=[], help="indices of K'")
    _add_command(subparsers, "nmax", cmd_nmax)
    strata = _add_command(subparsers, "strata", cmd_strata, bound=True)
    strata.add_argument("--tau", help="Omega element of the coset; identity if omitted")
    fixtures = _add_command(subparsers, "fixtures", cmd_fixtures, bound=True)
    fixtures.add_argument("--depth", type=int, help="conjugator length of class balls")
    fixtures.add_argument("--output", required=True, help="JSON file to write")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand.

    Returns:
        0 on success, 1 when a file cannot be read or written, 2 on any
        other error.
    """
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)
    _logger.debug("running %s with %s", args.command, args.datum)
    try:
        session = build_session(load_config(args.datum))
        report = args.handler(session, args)
        output_format = (
            OutputFormat(args.format) if args.format else session.config.format
        )
        text = render(report, output_format)
    except OSError as err:
        print(f"cli: {err.filename}: {err.strerror}", file=sys.stderr)
        return 1
    except WeylStrataError as err:
        print(f"{err.module}: {err}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 0
