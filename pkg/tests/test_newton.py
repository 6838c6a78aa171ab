import random
from fractions import Fraction
from functools import cache

import pytest

from tests.conftest import ball, compare_items, elements, load_session
from weylstrata.elements import ExtAffElt
from weylstrata.newton import (
    FiberReport,
    KottwitzClass,
    MoveStep,
    NewtonEngine,
    NewtonPair,
    NotMinimalError,
    StandardTriple,
    n_max,
)
from weylstrata.types import PivotStrategy


@pytest.mark.parametrize("name,expected", [("a1", 1), ("a2", 3), ("c2", 4)])
def test_n_max(name, expected):
    assert n_max(load_session(name).group) == expected


def test_newton_point_of_translation(a1):
    point = a1.engine.newton_point(a1.group.parse("s1 s0"))
    assert point.nu == (-1,)
    assert point.nu_bar == (1,)
    assert point.witness_power == 1


def test_newton_point_of_reflection(a1):
    point = a1.engine.newton_point(a1.group.parse("s1"))
    assert point.nu == (0,)
    assert point.witness_power == 2


def test_newton_point_under_twist(a1_twisted):
    # (s0θ)² = s0·θ(s0)·θ² = s0 s1 = t^{α∨} and α∨ = 2ω∨
    engine = a1_twisted.engine
    s0 = a1_twisted.group.parse("s0")
    point = engine.newton_point(s0)
    assert point.nu == (Fraction(1),)
    assert point.witness_power == 2
    assert engine.translation_power(s0, 1) is None
    assert engine.translation_power(s0, 2) == (2,)


def test_newton_point_ignores_the_centre_of_the_twist():
    session = load_session("gl2_twisted")
    engine, group = session.engine, session.group
    assert engine.newton_point(group.identity).nu == (0, 0)
    reflection = engine.newton_point(group.parse("s0"))
    assert reflection.nu == (Fraction(1, 2), Fraction(-1, 2))
    assert reflection.witness_power == 2
    assert engine.is_straight(group.parse("s0"))
    assert engine.newton_point(group.token("d")).nu == (Fraction(1, 2), Fraction(1, 2))


def test_pi(a1):
    engine = a1.engine
    e, s1, t = elements(a1, "", "s1", "s0 s1")
    assert engine.pi(s1) == engine.pi(e)
    assert engine.pi(t) == NewtonPair(KottwitzClass(()), (Fraction(1),))


def test_straightness(a1):
    engine = a1.engine
    straight = [engine.is_straight(e) for e in elements(a1, "", "s0", "s0 s1", "s0 s1 s0")]
    assert straight == [True, False, True, False]


def test_reduce_to_min(a1):
    group, engine = a1.group, a1.engine
    result = engine.reduce_to_min(group.parse("s0 s1 s0"))
    assert result.minimal_element == group.parse("s1")
    assert result.path == (MoveStep("s0", -2),)
    assert result.class_label == group.parse("s1")
    assert result.edges


def test_reduce_minimal_element_is_a_no_op(a1):
    result = a1.engine.reduce_to_min(a1.group.identity)
    assert result.minimal_element == a1.group.identity
    assert result.path == ()


def test_find_descent(a1):
    group, engine = a1.group, a1.engine
    descent = engine.find_descent(group.parse("s0 s1 s0"))
    assert descent is not None
    assert descent.generator == 0
    assert descent.target == group.parse("s1")
    assert descent.path == ()
    assert engine.find_descent(group.parse("s1")) is None


def test_min_closure(a1):
    group, engine = a1.group, a1.engine
    assert engine.min_closure(group.parse("s0 s1")) == set(
        elements(a1, "s0 s1", "s1 s0")
    )
    with pytest.raises(NotMinimalError):
        engine.min_closure(group.parse("s0 s1 s0"))


def test_twisted_class_joins_s0_and_s1(a1_twisted):
    group, engine = a1_twisted.group, a1_twisted.engine
    s1 = group.parse("s1")
    assert engine.is_minimal(s1)
    assert engine.class_label(s1) == group.parse("s0")
    assert engine.class_min_set(s1) == set(elements(a1_twisted, "s0", "s1"))


def test_fiber_of_identity(a1):
    fiber = a1.engine.fiber_min(a1.group.identity)
    assert fiber.count == 3
    assert [a1.group.format(c.label) for c in fiber.classes] == ["e", "s0", "s1"]
    assert [c.straight for c in fiber.classes] == [True, False, False]


def test_fiber_of_translation(a1):
    fiber = a1.engine.fiber_min(a1.group.parse("s0 s1"))
    assert fiber.bound == 3
    assert len(fiber.classes) == 1
    assert fiber.classes[0].straight
    assert fiber.elements == set(elements(a1, "s0 s1", "s1 s0"))


def test_fiber_of_omega_element(a1_adjoint):
    fiber = a1_adjoint.engine.fiber_min(a1_adjoint.group.token("p"))
    assert fiber.count == 1


def test_standard_triples_at_zero(a1):
    e, s0, s1 = elements(a1, "", "s0", "s1")
    triples = a1.engine.standard_triples(e)
    compare_items(
        triples,
        StandardTriple(e, (), e),
        StandardTriple(e, (0,), s0),
        StandardTriple(e, (1,), s1),
    )


def test_standard_triples_of_translation(a1):
    triples = a1.engine.standard_triples(a1.group.parse("s0 s1"))
    assert {t.product for t in triples} == set(elements(a1, "s0 s1", "s1 s0"))
    assert all(t.subset == () for t in triples)


def test_stratify_ball(a1):
    counts = a1.engine.stratify_ball(a1.group.identity, 2)
    assert counts == {
        NewtonPair(KottwitzClass(()), (Fraction(0),)): 3,
        NewtonPair(KottwitzClass(()), (Fraction(1),)): 2,
    }


def test_stratum_cover(a1):
    engine = a1.engine
    cover = engine.stratum_cover(a1.group.parse("s0 s1 s0"))
    assert cover == [engine.pi(a1.group.identity), engine.pi(a1.group.parse("s0 s1"))]



ALL_SESSIONS = [
    ("a1", 10),
    ("a1_adjoint", 10),
    ("a1_adjoint_twisted", 10),
    ("a2", 10),
    ("a2_swap", 10),
    ("a2_adjoint_rotated", 8),
    ("c2", 10),
    ("gl2_twisted", 10),
]

FIBER_SESSIONS = [
    ("a1", 8),
    ("a1_adjoint", 8),
    ("a1_adjoint_twisted", 8),
    ("a2", 8),
    ("a2_swap", 8),
    ("a2_adjoint_rotated", 6),
    ("gl2_twisted", 8),
]


@cache
def fibers(name: str, radius: int) -> list[FiberReport]:
    """One fiber per stratum label met in the ball."""
    session = load_session(name)
    engine = session.engine
    seeds = {engine.pi(e): e for e in ball(session, radius)}
    return [engine.fiber_min(seed) for seed in seeds.values()]


def replay(engine: NewtonEngine, element: ExtAffElt, path) -> list[ExtAffElt]:
    """Elements visited when following the move tokens of `path`."""
    visited = [element]
    for step in path:
        neighbors = {token: neighbor for _, token, neighbor in engine.moves(visited[-1])}
        visited.append(neighbors[step.token])
    return visited


@pytest.mark.parametrize("name,radius", ALL_SESSIONS)
def test_reduction_reaches_a_minimal_element(name, radius):
    session = load_session(name)
    group, engine = session.group, session.engine
    for element in ball(session, radius):
        result = engine.reduce_to_min(element)
        visited = replay(engine, element, result.path)
        assert visited[-1] == result.minimal_element
        for step, before, after in zip(result.path, visited, visited[1:]):
            assert step.length_change <= 0
            assert group.length(after) - group.length(before) == step.length_change
            assert engine.pi(after) == engine.pi(before)
        assert engine.find_descent(result.minimal_element) is None


@pytest.mark.parametrize("name,radius", ALL_SESSIONS)
def test_simple_moves_change_the_length_by_zero_or_two(name, radius):
    session = load_session(name)
    group, engine = session.group, session.engine
    for element in ball(session, radius):
        length = group.length(element)
        for _, _, neighbor in engine.moves(element):
            assert group.length(neighbor) - length in (-2, 0, 2)


@pytest.mark.parametrize("name,radius", ALL_SESSIONS)
def test_newton_point_does_not_depend_on_the_witness_power(name, radius):
    session = load_session(name)
    group, engine = session.group, session.engine
    for element in ball(session, radius):
        point = engine.newton_point(element)
        power = point.witness_power
        assert power % session.twist.order == 0
        mu = engine.translation_power(element, power)
        assert mu == tuple(power * c for c in point.nu)
        assert engine.translation_power(element, 2 * power) == tuple(2 * c for c in mu)
        straight_length = engine.straight_length(engine.pi(element))
        assert group.length(group.translation(mu)) == power * straight_length


@pytest.mark.parametrize("name,radius", ALL_SESSIONS)
def test_length_is_at_least_the_straight_length(name, radius):
    session = load_session(name)
    group, engine = session.group, session.engine
    for element in ball(session, radius):
        straight_length = engine.straight_length(engine.pi(element))
        assert group.length(element) >= straight_length
        assert (group.length(element) == straight_length) == engine.is_straight(element)


@pytest.mark.parametrize("name", ["a1", "a1_adjoint", "a1_adjoint_twisted", "a2", "a2_swap"])
def test_pivot_strategy_does_not_change_the_class_label(name):
    session = load_session(name)
    engine = session.engine
    for element in ball(session, 8):
        default = engine.reduce_to_min(element, PivotStrategy.DEFAULT)
        reversed_ = engine.reduce_to_min(element, PivotStrategy.REVERSED)
        assert default.class_label == reversed_.class_label


@pytest.mark.parametrize(
    "name,radius",
    [
        ("a1", 10),
        ("a1_adjoint", 10),
        ("a1_adjoint_twisted", 10),
        ("a2", 8),
        ("a2_swap", 8),
        ("a2_adjoint_rotated", 6),
        ("c2", 8),
        ("gl2_twisted", 8),
    ],
)
def test_pi_is_a_class_invariant(name, radius):
    session = load_session(name)
    engine, twist = session.engine, session.twist
    rng = random.Random(1729)
    conjugators = ball(session, 4)
    for element in ball(session, radius):
        expected = engine.pi(element)
        for x in rng.choices(conjugators, k=500):
            assert engine.pi(twist.conjugate(x, element)) == expected


@pytest.mark.parametrize("name,radius", ALL_SESSIONS)
def test_distinct_labels_never_share_a_class(name, radius):
    session = load_session(name)
    engine = session.engine
    pairs: dict[ExtAffElt, NewtonPair] = {}
    for element in ball(session, radius):
        if not engine.is_minimal(element):
            continue
        label = engine.class_label(element)
        assert pairs.setdefault(label, engine.pi(element)) == engine.pi(element)
        for member in engine.class_min_set(element):
            assert engine.pi(member) == engine.pi(element)


@pytest.mark.parametrize("name,radius", FIBER_SESSIONS)
def test_each_fiber_has_one_straight_class(name, radius):
    for fiber in fibers(name, radius):
        assert sum(c.straight for c in fiber.classes) == 1


@pytest.mark.parametrize("name,radius", FIBER_SESSIONS)
def test_fiber_lengths_are_bounded(name, radius):
    session = load_session(name)
    group, engine = session.group, session.engine
    for fiber in fibers(name, radius):
        limit = engine.straight_length(fiber.pair) + engine.n_max
        for element in fiber.elements:
            assert group.length(element) <= limit
            assert engine.pi(element) == fiber.pair


@pytest.mark.parametrize("name,radius", FIBER_SESSIONS)
def test_triples_reach_every_class_of_the_fiber(name, radius):
    session = load_session(name)
    engine = session.engine
    for fiber in fibers(name, radius):
        seed = fiber.classes[0].label
        products = {t.product for t in engine.standard_triples(seed)}
        assert products <= fiber.elements
        assert {engine.class_label(p) for p in products} == {c.label for c in fiber.classes}

