from functools import cache
from pathlib import Path
from typing import Collection

import pytest

from weylstrata.config import Session, build_session, load_config
from weylstrata.elements import ExtAffElt

DATA = Path(__file__).parent / "data"


def compare(result: object, expected: object):
    """Compare two objects for equality.

    Compares the field dicts instead of relying on `__eq__`, so a failure
    shows which field differs.
    """
    assert type(result) is type(expected)

    assert result.__dict__ == expected.__dict__


def compare_items(items: Collection, *objects):
    assert len(items) == len(
        objects
    ), "actual item count not equal to expected item count."

    for item, object in zip(items, objects, strict=True):
        compare(item, object)


@cache
def load_session(name: str) -> Session:
    """Session built from `tests/data/<name>.toml`, shared between tests."""
    return build_session(load_config(DATA / f"{name}.toml"))


def elements(session: Session, *texts: str) -> list[ExtAffElt]:
    return [session.group.parse(text) for text in texts]


def ball(session: Session, radius: int) -> list[ExtAffElt]:
    """Union of the torsion coset balls, ShortLex sorted."""
    group = session.group
    found = {
        e
        for tau in group.torsion_omega_reps()
        for e in group.enumerate_coset_ball(tau, radius)
    }
    return group.sorted(found)


@pytest.fixture
def a1() -> Session:
    return load_session("a1")


@pytest.fixture
def a1_adjoint() -> Session:
    return load_session("a1_adjoint")


@pytest.fixture
def a1_twisted() -> Session:
    return load_session("a1_adjoint_twisted")


@pytest.fixture
def a2() -> Session:
    return load_session("a2")


@pytest.fixture
def a2_swap() -> Session:
    return load_session("a2_swap")


@pytest.fixture
def gl2() -> Session:
    return load_session("gl2")
