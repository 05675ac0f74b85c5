import pytest

from antisym_ainf.cli import fixture_names, read_input
from antisym_ainf.formality import torus_model
from antisym_ainf.scalars import ONE, rational
from antisym_ainf.textio import ParseError, emit, model_for, parse

MINIMAL = """\
# comment line
grading 0
generators v1:1 v2:1   # trailing comment
truncation energy 3 arity 5
canonical_m2
"""


def test_canonical_m2_directive():
    model = parse(MINIMAL)
    g, m, c = torus_model(2)
    assert model.structure == m
    assert model.involution_map().cols == c.cols
    assert model.trunc.energy == 3 and model.trunc.arity == 5


def test_explicit_ops_and_normalization():
    text = MINIMAL + "op 3 1/2 : v1, v1, v2 -> 2*v1.v2 + -1*v1.v2\n"
    model = parse(text)
    assert model.structure.entry(3, rational("1/2")) == {(1, 1, 2): {3: ONE}}
    out = emit(model)
    assert "op 3 1/2 : v1, v1, v2 -> 1*v1.v2" in out
    assert emit(parse(out)) == out


def test_emit_parse_round_trip_on_fixtures():
    for name in fixture_names():
        text = read_input("@" + name)
        once = emit(parse(text))
        assert emit(parse(once)) == once
        assert parse(once).structure == parse(text).structure


def test_model_for_round_trip():
    g, m, c = torus_model(3)
    model = model_for(m, None, c)
    assert parse(emit(model)).structure == m


@pytest.mark.parametrize("text,line,reason", [
    ("generators v1:1 v1:1\n", 1, "duplicate generator"),
    ("generators v1:1 v2:2\n", 1, "even degree"),
    ("generators v1:1\nop 2 0 : v1, v1 -> 1*v1\n", 2, "needs degree"),
    ("generators v1:1\ntruncation energy 1 arity 3\nop 2 2 : v1, 1 -> 1*v1\n", 3, "exceeds E_max"),
    ("generators v1:1\nfrobnicate\n", 2, "unknown directive"),
    ("generators v1:1\nop 1 0 : v9 -> 1*v1\n", 2, "unknown basis vector"),
    ("generators v1:1\nop 2 0 : v1 -> 1*1\n", 2, "lists 1 inputs"),
    ("grading 3\ngenerators v1:1\n", 1, "even and nonnegative"),
    ("", 1, "no generators"),
])
def test_parse_errors(text, line, reason):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.line == line
    assert reason in exc.value.reason
    assert exc.value.column >= 1


def test_error_column_points_at_token():
    with pytest.raises(ParseError) as exc:
        parse("generators v1:1 v2:4\n")
    assert exc.value.column == 17


def test_extra_vectors_and_signs():
    model = parse(read_input("@torus2_acyclic_base"))
    assert tuple(model.space.labels[-2:]) == ("x", "y")
    c = model.involution_map()
    assert c.col(model.space.index("x")) == {model.space.index("x"): ONE}
    with pytest.raises(ParseError, match="extra vectors only"):
        parse(MINIMAL + "involution_sign v1 1\n")
