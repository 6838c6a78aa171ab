import json

import pytest

from tests.conftest import DATA, ball, load_session
from weylstrata.hecke import HeckeElt, parse_poly
from weylstrata.oracle import (
    finite_order,
    generate_fixtures,
    oracle_ball,
    oracle_class_ball,
    oracle_hecke_mul,
    oracle_length,
    oracle_straight,
    oracle_word,
    words,
)


@pytest.mark.parametrize(
    "name,radius",
    [
        ("a1", 10),
        ("a1_adjoint", 10),
        ("a2", 8),
        ("c2", 8),
        ("a2_adjoint_rotated", 6),
        ("gl2", 8),
    ],
)
def test_length_formula_counts_inverted_roots(name, radius):
    session = load_session(name)
    for element in ball(session, radius):
        assert session.group.length(element) == oracle_length(session.group, element)


def test_oracle_examples_a1(a1):
    group, twist = a1.group, a1.twist
    reflection, translation = group.parse("s0 s1 s0"), group.parse("s0 s1")
    assert oracle_length(group, translation) == 2
    assert oracle_class_ball(twist, reflection, 0) == {reflection}
    assert group.parse("s1") in oracle_class_ball(twist, reflection, 1)
    assert oracle_straight(twist, translation, 4)
    assert not oracle_straight(twist, reflection, 4)
    assert oracle_straight(twist, group.identity, 4)


def test_oracle_length_of_omega(a1_adjoint):
    assert oracle_length(a1_adjoint.group, a1_adjoint.group.token("p")) == 0


def test_words(a1):
    assert len(words(a1.group, 2)) == 5
    assert len(words(a1.group, 0)) == 1


@pytest.mark.parametrize(
    "name,radius", [("a1_adjoint", 4), ("a2", 3), ("a2_adjoint_rotated", 2)]
)
def test_coset_balls_agree(name, radius):
    session = load_session(name)
    assert set(ball(session, radius)) == set(oracle_ball(session.group, radius))


@pytest.mark.parametrize("name", ["a1_adjoint", "a2_adjoint_rotated"])
def test_oracle_word_spells_the_element(name):
    session = load_session(name)
    group = session.group
    for element in ball(session, 3):
        word, tau = oracle_word(group, element)
        assert len(word) == group.length(element)
        assert oracle_length(group, tau) == 0
        assert group.from_word([f"s{i}" for i in word]) * tau == element


@pytest.mark.parametrize(
    "name,radius",
    [
        ("a1", 8),
        ("a1_adjoint_twisted", 8),
        ("a2", 6),
        ("a2_swap", 6),
        ("a2_adjoint_rotated", 5),
        ("gl2_twisted", 8),
    ],
)
def test_straightness_agrees(name, radius):
    session = load_session(name)
    twist = session.twist
    kmax = twist.order * finite_order(session.group)
    for element in ball(session, radius):
        assert session.engine.is_straight(element) == oracle_straight(twist, element, kmax)


@pytest.mark.parametrize("name", ["a1", "a1_adjoint_twisted"])
def test_reduction_reaches_the_shortest_conjugate(name):
    session = load_session(name)
    group, engine = session.group, session.engine
    for element in ball(session, 3):
        conjugates = oracle_class_ball(session.twist, element, 2)
        shortest = min(oracle_length(group, c) for c in conjugates)
        assert group.length(engine.reduce_to_min(element).minimal_element) == shortest
        label = engine.class_label(element)
        for conjugate in conjugates:
            if oracle_length(group, conjugate) == shortest:
                assert engine.class_label(conjugate) == label


@pytest.mark.parametrize("name", ["a1", "a1_adjoint", "a2_swap"])
def test_hecke_products_agree(name):
    session = load_session(name)
    group, algebra = session.group, session.cocenter.algebra
    sample = ball(session, 4)
    for x in sample:
        for y in sample:
            if group.length(x) + group.length(y) > 4:
                continue
            first, second = algebra.basis(x), algebra.basis(y)
            assert algebra.mul(first, second) == oracle_hecke_mul(algebra, first, second)


GOLDEN = DATA / "golden"


def golden(name: str) -> dict:
    return json.loads((GOLDEN / f"{name}.json").read_text(encoding="utf-8"))


@pytest.mark.parametrize("name", ["a1"])
def test_oracle_regenerates_the_golden_data(name):
    expected = golden(name)
    assert generate_fixtures(load_session(name).twist, expected["radius"]) == expected


@pytest.mark.parametrize("name", ["a1"])
def test_main_modules_agree_with_the_golden_data(name):
    session = load_session(name)
    data = golden(name)
    group, engine, algebra = session.group, session.engine, session.cocenter.algebra
    for entry in data["elements"]:
        element = group.parse(entry["element"])
        assert group.length(element) == entry["length"]
        assert engine.is_straight(element) == entry["straight"]
        minimal = [group.parse(text) for text in entry["class_minimal"]]
        reached = engine.reduce_to_min(element).minimal_element
        assert group.length(reached) == group.length(minimal[0])
        assert {engine.class_label(m) for m in minimal} == {engine.class_label(element)}
    for entry in data["products"]:
        x, y = group.parse(entry["left"]), group.parse(entry["right"])
        expected = HeckeElt(
            {group.parse(label): parse_poly(coeff) for label, coeff in entry["product"]}
        )
        assert algebra.mul(algebra.basis(x), algebra.basis(y)) == expected
    for entry in data["double_cosets"]:
        reps = session.rigid.double_coset_reps(
            entry["left"], entry["right"], data["radius"], group.torsion_omega_reps()
        )
        assert [group.format(e) for e in reps] == entry["reps"]


def test_fixture_counts(a1):
    fixtures = generate_fixtures(a1.twist, 2)
    assert len(fixtures["elements"]) == 5
    assert len(fixtures["products"]) == 13
    assert len(fixtures["double_cosets"]) == 9
    json.dumps(fixtures)
