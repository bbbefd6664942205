import pytest
from hypothesis import given, strategies as st

from bpr.bases import ALeaf, ANode, Base, premise, rule
from bpr.calculus import random_derivation
from bpr.fileformat import (
    FormatError, format_atomic_derivation, format_base, format_derivation, format_mapping,
    is_atomic_derivation_text, parse_atomic_derivation, parse_base, parse_derivation,
    parse_mapping,
)
from bpr.sexpr import SexprError, read_all, read_one
from bpr.syntax import MINUS, PLUS, Atom, parse_formula


def test_sexpr_reader_positions():
    with pytest.raises(SexprError) as e:
        read_one("(a\n  (b c)")
    assert e.value.line >= 1
    assert read_all("; note\n(a b) (c)") == [["a", "b"], ["c"]]


@given(st.integers(0, 10**6), st.integers(1, 40))
def test_derivation_round_trip(seed, n):
    d = random_derivation(seed, n, "pqr")
    text = format_derivation(d)
    assert parse_derivation(text) == d
    assert format_derivation(parse_derivation(text)) == text


@pytest.mark.parametrize("text, where", [
    ("(rule imp+i (concl + p ->) (discharge))", "1:"),
    ("(rule nope (concl + p))", "1:7"),
    ("(hyp + x p)", "1:"),
    ("(rule and+i\n  (concl + p & q)\n  (hyp + 0 p)\n  (hip + 0 q))", "4:3"),
])
def test_derivation_errors_carry_positions(text, where):
    with pytest.raises(FormatError) as e:
        parse_derivation(text)
    assert str(e.value).startswith(where)


def test_base_round_trip():
    b = Base.make([
        rule("s", PLUS, [premise("r", PLUS, gamma=["q"])], name="r1"),
        rule("q", MINUS, name="ax"),
        rule("bot", PLUS, [premise("p", PLUS), premise("p", MINUS, delta=["q", "r"])]),
    ], atoms=["p"])
    text = format_base(b)
    again = parse_base(text)
    assert again == b
    assert {r.name for r in again.rules} == {r.name for r in b.rules}
    assert format_base(again) == text


def test_base_errors():
    with pytest.raises(FormatError):
        parse_base("(base (rule r (concl + P)))")
    with pytest.raises(FormatError):
        parse_base("(base (rule r (prem => + p)))")
    with pytest.raises(ValueError):
        parse_base("(base (rule r (concl + p)) (rule r (concl - p)))")


def test_atomic_derivation_round_trip():
    r1 = rule("q", PLUS, [premise("p", PLUS)], name="r1")
    b = Base.make([r1])
    d = ANode(r1, "q", PLUS, (ALeaf("p", PLUS),))
    text = format_atomic_derivation(d)
    assert is_atomic_derivation_text("; c\n" + text)
    assert not is_atomic_derivation_text("(rule top+ax (concl + top) (discharge))")
    assert parse_atomic_derivation(text, b) == d
    with pytest.raises(FormatError):
        parse_atomic_derivation(text.replace("r1", "r9"), b)


def test_mapping_round_trip():
    table = {Atom("p"): "p", parse_formula("p -> q"): "s_1", parse_formula("top <- p"): "s_2"}
    text = format_mapping(table)
    assert text.splitlines()[0] == "p := p"
    assert parse_mapping(text) == table
    with pytest.raises(FormatError):
        parse_mapping("p = q")
