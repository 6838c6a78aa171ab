import json

import pytest

from tests.conftest import DATA
from weylstrata.cli import main


def datum(name: str) -> str:
    return str(DATA / f"{name}.toml")


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_structured(capsys, *argv: str) -> dict:
    code, out, err = run(capsys, *argv, "--format", "structured")
    assert code == 0, err
    return json.loads(out)


def test_classify_text(capsys):
    code, out, err = run(capsys, "classify", "--datum", datum("a1"), "--element", "s0 s1")
    assert code == 0
    assert err == ""
    assert out == (
        "element: s0 s1\n"
        "length: 2\n"
        "kappa: ()\n"
        "nu_bar: (1)\n"
        "nu: (1)\n"
        "witness_power: 1\n"
        "straight: true\n"
        "minimal: true\n"
        "class_label: s0 s1\n"
    )


def test_classify_twisted(capsys):
    result = run_structured(
        capsys, "classify", "--datum", datum("a1_adjoint_twisted"), "--element", "s1"
    )
    assert result["command"] == "classify"
    assert result["minimal"] is True
    assert result["class_label"] == "s0"
    assert result["nu_bar"] == "(1)"


def test_reduce_text(capsys):
    code, out, _ = run(capsys, "reduce", "--datum", datum("a1"), "--element", "s0 s1 s0")
    assert code == 0
    assert out == (
        "element: s0 s1 s0\n"
        "minimal_element: s1\n"
        "class_label: s1\n"
        "path:\n"
        "  - token: s0\n"
        "    length_change: -2\n"
    )


def test_reduce_dot(capsys):
    code, out, _ = run(
        capsys,
        "reduce",
        "--datum",
        datum("a1"),
        "--element",
        "s0 s1 s0",
        "--format",
        "dot",
    )
    assert code == 0
    assert out == (
        'digraph "reduce" {\n'
        '  "s1";\n'
        '  "s0 s1 s0";\n'
        '  "s0 s1 s0" -> "s1" [label="s0", style=solid];\n'
        "}\n"
    )


def test_reduce_reversed_pivot(capsys):
    result = run_structured(
        capsys,
        "reduce",
        "--datum",
        datum("a2"),
        "--element",
        "s0 s1 s2 s0",
        "--pivot",
        "reversed",
    )
    default = run_structured(
        capsys, "reduce", "--datum", datum("a2"), "--element", "s0 s1 s2 s0"
    )
    assert result["class_label"] == default["class_label"]


@pytest.mark.parametrize("element", ["e", ""])
def test_fiber(capsys, element):
    result = run_structured(capsys, "fiber", "--datum", datum("a1"), "--element", element)
    assert result["N_nu"] == 3
    assert result["bound"] == 1
    assert [c["label"] for c in result["classes"]] == ["e", "s0", "s1"]
    assert result["classes"][1]["minimal_elements"] == ["s0"]
    assert [c["straight"] for c in result["classes"]] == [True, False, False]


def test_fiber_dot(capsys):
    code, out, _ = run(
        capsys, "fiber", "--datum", datum("a1"), "--element", "s0 s1", "--format", "dot"
    )
    assert code == 0
    assert '"s0 s1" -> "s1 s0" [label="s0", style=dashed];' in out


def test_triples(capsys):
    result = run_structured(capsys, "triples", "--datum", datum("a1"), "--element", "e")
    assert result["triples"] == [
        {"x": "e", "K": [], "u": "e", "product": "e"},
        {"x": "e", "K": [0], "u": "s0", "product": "s0"},
        {"x": "e", "K": [1], "u": "s1", "product": "s1"},
    ]


def test_cocenter_text(capsys):
    code, out, _ = run(
        capsys, "cocenter", "--datum", datum("a1"), "--element", "s0 s1 s0", "--q", "2"
    )
    assert code == 0
    assert out == (
        "element: s0 s1 s0\n"
        "terms:\n"
        "  - q * [s1]\n"
        "  - (-1 + q) * [s0 s1]\n"
        "specialized:\n"
        "  s1: 2\n"
        "  s0 s1: 1\n"
    )


def test_grade(capsys):
    result = run_structured(
        capsys, "grade", "--datum", datum("a1"), "--element", "s0 s1 s0"
    )
    assert result["components"] == [
        {"kappa": "()", "nu_bar": "(0)", "terms": ["q * [s1]"]},
        {"kappa": "()", "nu_bar": "(1)", "terms": ["(-1 + q) * [s0 s1]"]},
    ]


def test_trace_check(capsys):
    code, out, _ = run(
        capsys,
        "trace-check",
        "--datum",
        datum("a1_adjoint_twisted"),
        "--element",
        "p",
        "--other",
        "s0",
    )
    assert code == 0
    assert out == "x: p\ny: s0\nholds: true\ndiscrepancy: []\n"


def test_rigid_pairs(capsys):
    result = run_structured(capsys, "rigid-pairs", "--datum", datum("a1_adjoint"))
    assert result["pairs"] == [
        {"K": [], "tau": "e"},
        {"K": [0], "tau": "e"},
        {"K": [1], "tau": "e"},
        {"K": [], "tau": "p"},
    ]
    assert result["products"] == ["e", "p", "s0", "s1"]


def test_rigid_pairs_explicit_tau(capsys):
    result = run_structured(
        capsys, "rigid-pairs", "--datum", datum("a1_adjoint"), "--tau", "p"
    )
    assert result["pairs"] == [{"K": [], "tau": "p"}]


def test_rigid_cover(capsys):
    result = run_structured(
        capsys,
        "rigid-cover",
        "--datum",
        datum("a1"),
        "--element",
        "s0",
        "--element",
        "e",
    )
    assert result["covers"] == [
        {"element": "e", "pair": {"K": [], "tau": "e"}},
        {"element": "s0", "pair": {"K": [0], "tau": "e"}},
    ]


def test_rigid_cover_rejects_non_rigid(capsys):
    code, out, err = run(
        capsys, "rigid-cover", "--datum", datum("a1"), "--element", "s0 s1"
    )
    assert code == 2
    assert out == ""
    assert err.startswith("rigid: ")


@pytest.mark.parametrize(
    "left,right,expected",
    [("0", "1", ["e", "s1 s0"]), ("0", "0", ["e", "s1"])],
)
def test_dcosets(capsys, left, right, expected):
    result = run_structured(
        capsys,
        "dcosets",
        "--datum",
        datum("a1"),
        "--left",
        left,
        "--right",
        right,
        "--bound",
        "2",
    )
    assert result["reps"] == expected


def test_dcosets_unknown_index(capsys):
    code, _, err = run(capsys, "dcosets", "--datum", datum("a1"), "--left", "5")
    assert code == 2
    assert err == "weyl: unknown token 's5'\n"


@pytest.mark.parametrize("name,expected", [("a1", 1), ("a2", 3), ("c2", 4)])
def test_nmax(capsys, name, expected):
    assert run_structured(capsys, "nmax", "--datum", datum(name)) == {
        "command": "nmax",
        "n_max": expected,
    }


def test_strata(capsys):
    result = run_structured(capsys, "strata", "--datum", datum("a1"), "--bound", "2")
    assert result["tau"] == "e"
    assert result["strata"] == [
        {"kappa": "()", "nu_bar": "(0)", "count": 3},
        {"kappa": "()", "nu_bar": "(1)", "count": 2},
    ]


def test_strata_default_bound(capsys):
    result = run_structured(
        capsys, "strata", "--datum", datum("a1_adjoint"), "--tau", "p"
    )
    assert result["tau"] == "p"
    # the coset ball of p up to length 6 has 13 elements
    assert sum(s["count"] for s in result["strata"]) == 13


def test_fixtures(capsys, tmp_path):
    output = tmp_path / "fixtures.json"
    code, out, _ = run(
        capsys,
        "fixtures",
        "--datum",
        datum("a1"),
        "--bound",
        "2",
        "--output",
        str(output),
    )
    assert code == 0
    assert out == f"output: {output}\nradius: 2\nelements: 5\nproducts: 13\ndouble_cosets: 9\n"
    data = json.loads(output.read_text(encoding="utf-8"))
    assert len(data["elements"]) == 5
    assert data == json.loads((DATA / "golden" / "a1.json").read_text(encoding="utf-8"))


def test_unknown_token(capsys):
    code, out, err = run(capsys, "classify", "--datum", datum("a1"), "--element", "s5")
    assert code == 2
    assert out == ""
    assert err == "weyl: unknown token 's5'\n"


def test_missing_session_file(capsys, tmp_path):
    missing = tmp_path / "missing.toml"
    code, _, err = run(capsys, "nmax", "--datum", str(missing))
    assert code == 1
    assert err == f"cli: {missing}: No such file or directory\n"


def test_bad_lattice(capsys):
    code, _, err = run(capsys, "nmax", "--datum", datum("bad_lattice"))
    assert code == 2
    assert err == "root_datum: lattice does not contain Q∨\n"


def test_invalid_session_file(capsys, tmp_path):
    path = tmp_path / "session.toml"
    path.write_text('cartan_type = "A1"\ncolour = "red"\n', encoding="utf-8")
    code, _, err = run(capsys, "nmax", "--datum", str(path))
    assert code == 2
    assert err.startswith(f"config: {path}: colour")


def test_dot_needs_a_graph(capsys):
    code, out, err = run(
        capsys, "classify", "--datum", datum("a1"), "--element", "e", "--format", "dot"
    )
    assert code == 2
    assert out == ""
    assert err == "report: dot output is not available for classify\n"


def test_session_file_chooses_the_format(capsys, tmp_path):
    path = tmp_path / "session.toml"
    path.write_text('cartan_type = "A1"\nformat = "structured"\n', encoding="utf-8")
    result = json.loads(run(capsys, "nmax", "--datum", str(path))[1])
    assert result == {"command": "nmax", "n_max": 1}


def test_verbose(capsys):
    code, out, _ = run(capsys, "nmax", "--datum", datum("a1"), "--verbose")
    assert code == 0
    assert out == "n_max: 1\n"


def test_missing_datum_option():
    with pytest.raises(SystemExit):
        main(["nmax"])
