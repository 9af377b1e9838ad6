from __future__ import annotations

import io
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arrperv.cli import DATA_DIR, run
from arrperv.errors import ParseError
from arrperv.linalg import Matrix
from arrperv.serialize import (
    dumps,
    load,
    matrix_from_json,
    matrix_to_json,
    parse_document,
    parse_rational,
    rational_to_str,
    to_json,
)

DATA_FILES = sorted(DATA_DIR.glob("*.json"))


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("path", DATA_FILES, ids=[p.name for p in DATA_FILES])
def test_bundled_files_round_trip_byte_exact(path):
    text = path.read_text()
    kind, value = parse_document(text, path.name)
    assert dumps(to_json(kind, value)) == text


def test_rational_strings():
    assert parse_rational("1/2") == Fraction(1, 2)
    assert rational_to_str(Fraction(1, 2)) == "1/2"
    assert parse_rational("-3/7") == Fraction(-3, 7)
    assert rational_to_str(Fraction(-3, 7)) == "-3/7"
    assert parse_rational(4) == 4 and parse_rational("4/2") == 2
    for bad in ("0.5", "1/0", "abc", 0.5, True, "1//2", ""):
        with pytest.raises(ParseError):
            parse_rational(bad)


@given(st.fractions())
def test_rational_round_trip(x):
    assert parse_rational(rational_to_str(x)) == x


@given(st.lists(st.lists(st.fractions(max_denominator=50), min_size=2, max_size=2), min_size=1, max_size=3))
def test_matrix_round_trip(rows):
    m = Matrix(rows, 2)
    assert matrix_from_json(json.loads(json.dumps(matrix_to_json(m)))) == m


def test_parse_errors_carry_line_and_column():
    with pytest.raises(ParseError, match=r"in\.json:3:5"):
        parse_document('{\n  "dim": 1,\n    ]\n}', "in.json")


def test_structural_errors():
    with pytest.raises(ParseError, match="dimension mismatch"):
        parse_document('{"dim": 2, "hyperplanes": [["1"]]}')
    with pytest.raises(ParseError, match="malformed rational"):
        parse_document('{"dim": 1, "hyperplanes": [["x"]]}')
    with pytest.raises(ParseError, match="unknown face"):
        parse_document('{"arrangement": {"dim": 1, "hyperplanes": [["1"]]}, "dim": 1, '
                       '"actions": {"+": [["1"]], "-": [["1"]], "0": [["1"]], "++": [["1"]]}}')
    with pytest.raises(ParseError, match="missing"):
        parse_document('{"arrangement": {"dim": 1, "hyperplanes": [["1"]]}, "dim": 1, "actions": {"+": [["1"]]}}')
    with pytest.raises(ParseError):
        parse_document("[1, 2]")


def test_save_and_load(tmp_path):
    kind, value = load(DATA_DIR / "one_hyperplane_q2.json")
    target = tmp_path / "copy.json"
    target.write_text(dumps(to_json(kind, value)))
    assert target.read_text() == (DATA_DIR / "one_hyperplane_q2.json").read_text()


def test_cli_faces():
    code, out, _ = cli("faces", "examples/braid_a2.json")
    assert code == 0 and out.splitlines()[0] == "13 faces, 6 chambers"


def test_cli_validate_failure_lists_instances():
    code, out, _ = cli("validate", "examples/bad_module.json")
    assert code == 1
    assert "  R1 violated at face +-+" in out.splitlines()
    code, out, _ = cli("validate", "one_hyperplane_b0.json")
    assert code == 1 and "not invertible" in out


def test_cli_ic_report():
    code, out, _ = cli("ic", "examples/one_hyperplane.json", "--seed", "q=2")
    assert code == 0 and out.splitlines()[0] == "IC dim 2, i*=0, i!=0"
    code, out, _ = cli("ic", "one_hyperplane.json", "--seed", "q=1")
    assert out.splitlines()[0] == "IC dim 1, i*=0, i!=0"
    code, out, _ = cli("ic", "rw_a1.json")
    assert code == 0 and out.splitlines()[0] == "IC dim 1, i*=0, i!=0"


@pytest.mark.parametrize(
    "argv,code",
    [
        (("faces", "missing.json"), 2),
        (("faces", "one_line.json", "--format", "xml"), 2),
        (("collinear", "one_line.json", "+", "0", "-"), 0),
        (("collinear", "one_line.json", "+", "0", "++"), 2),
        (("salvetti", "braid_a2.json", "--base", "000"), 2),
        (("salvetti", "braid_a2.json", "--base", "+++"), 0),
        (("restrict", "braid_a2.json", "--flat", "0,1"), 2),
        (("restrict", "boolean2.json", "--flat", "0"), 0),
        (("restrict", "one_hyperplane_q2.json", "--base", "+"), 0),
        (("validate", "constant_braid_a2.json"), 0),
        (("validate", "rw_a2_sign.json"), 0),
        (("support", "boolean2_tensor.json"), 0),
        (("coxeter", "A2"), 0),
        (("coxeter", "H3"), 2),
        (("coxeter", "coxeter_b2.json"), 0),
        (("symsep", "symsep_unipotent.json"), 0),
        (("ic", "one_hyperplane.json", "--seed", "q=0"), 1),
        (("ic", "one_hyperplane.json", "--seed", "p=2"), 2),
        (("poset", "boolean2.json"), 0),
    ],
)
def test_cli_exit_codes(argv, code):
    assert cli(*argv)[0] == code


def test_cli_symsep_outputs():
    assert cli("symsep", "symsep_unipotent.json")[1] == "k = 1\n"
    assert cli("symsep", "symsep_zero.json")[1] == "none\n"


def test_cli_parse_error_is_reported(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 1,\n "hyperplanes": [["1"],]}')
    code, _, err = cli("faces", str(bad))
    assert code == 2 and "bad.json:2:" in err


@pytest.mark.parametrize(
    "argv",
    [("faces", "braid_a2.json"), ("salvetti", "braid_a2.json"), ("validate", "bad_module.json"),
     ("ic", "one_hyperplane.json", "--seed", "q=2"), ("coxeter", "A2"), ("support", "boolean2_tensor.json")],
)
def test_cli_output_is_deterministic(argv):
    for fmt in ("text", "json"):
        first = cli(*argv, "--format", fmt)
        assert first == cli(*argv, "--format", fmt)
        if fmt == "json":
            json.loads(first[1])


def test_cli_json_key_order_is_stable():
    _, out, _ = cli("faces", "one_line.json", "--format", "json")
    data = json.loads(out)
    assert list(data) == ["faces", "chambers", "by_codim", "list"]
    assert [f["signs"] for f in data["list"]] == ["+", "-", "0"]
