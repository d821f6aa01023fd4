import pytest
from hypothesis import given, settings

from _strategies import formulas
from prefteam.errors import ArityError, FormulaSyntaxError, FragmentError, UnknownVariableError
from prefteam.syntax import (
    BOT,
    TOP,
    And,
    Dep,
    Fragment,
    Inc,
    NegLiteral,
    Or,
    PosLiteral,
    cardinality_formula,
    classify,
    depth,
    flatten,
    generate_corpus,
    parse,
    subformulas,
    theta_formula,
    to_text,
    variables,
)
from prefteam.teams import Team

p, q, r = PosLiteral("p"), PosLiteral("q"), PosLiteral("r")


@pytest.mark.parametrize(
    "text, expected",
    [
        ("p", p),
        ("~p", NegLiteral("p")),
        ("top", TOP),
        ("bot", BOT),
        ("p & q | r", Or(And(p, q), r)),
        ("p | q & r", Or(p, And(q, r))),
        ("p | q | r", Or(Or(p, q), r)),
        ("p & (q | r)", And(p, Or(q, r))),
        ("=(p q; r)", Dep(("p", "q"), "r")),
        ("=(;p)", Dep((), "p")),
        ("inc(p q; q p)", Inc(("p", "q"), ("q", "p"))),
    ],
)
def test_parse(text, expected):
    assert parse(text) == expected


def test_printer_examples():
    assert to_text(Dep((), "p")) == "=(; p)"
    assert to_text(Dep(("p", "q"), "r")) == "=(p q ; r)"
    assert to_text(Inc(("p",), ("q",))) == "inc(p ; q)"
    assert to_text(And(Or(p, q), r)) == "(p | q) & r"
    assert to_text(Or(p, Or(q, r))) == "p | (q | r)"
    assert to_text(Or(Or(p, q), r)) == "p | q | r"


@given(formulas(["p", "q", "r"], "Mixed", max_leaves=10))
@settings(max_examples=300)
def test_print_parse_roundtrip(phi):
    assert parse(to_text(phi)) == phi


@pytest.mark.parametrize(
    "text, exc",
    [
        ("p &", FormulaSyntaxError),
        ("(p | q", FormulaSyntaxError),
        ("p q", FormulaSyntaxError),
        ("~(p)", FormulaSyntaxError),
        ("=(p;)", FormulaSyntaxError),
        ("=(p;q r)", FormulaSyntaxError),
        ("inc(p q; r)", ArityError),
        ("inc(;)", ArityError),
        ("p $ q", FormulaSyntaxError),
        ("=(top; p)", FormulaSyntaxError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse(text)


def test_error_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse("p & & q")
    assert info.value.position == 4


def test_unknown_variable():
    with pytest.raises(UnknownVariableError):
        parse("p | s", ["p", "q"])
    assert parse("p | q", ["p", "q"]) == Or(p, q)


def test_inc_constructor_checks_arity():
    with pytest.raises(ArityError):
        Inc(("p",), ("q", "r"))
    with pytest.raises(ArityError):
        Inc((), ())


def test_classify():
    assert classify(parse("p & ~q | top")) is Fragment.PL
    assert classify(parse("p | =(;q)")) is Fragment.PDL
    assert classify(parse("inc(p;q) & q")) is Fragment.PINCL
    assert classify(parse("inc(p;q) | =(;p)")) is Fragment.MIXED
    assert Fragment.PL.downward_closed and Fragment.PL.union_closed
    assert Fragment.PDL.downward_closed and not Fragment.PDL.union_closed
    assert Fragment.PINCL.union_closed and not Fragment.PINCL.downward_closed
    assert Fragment.parse("pincl") is Fragment.PINCL


def test_flatten():
    assert flatten(parse("=(p;q) | ~p & =(;r)")) == parse("top | ~p & top")
    with pytest.raises(FragmentError):
        flatten(parse("inc(p;q)"))


@given(formulas(["p", "q"], "PDL"))
def test_flatten_is_classical(phi):
    assert classify(flatten(phi)) is Fragment.PL
    assert variables(flatten(phi)) <= variables(phi)


def test_structure_helpers():
    phi = parse("(p | =(q;r)) & ~p")
    assert depth(phi) == 2
    assert depth(p) == 0
    assert variables(phi) == {"p", "q", "r"}
    subs = list(subformulas(phi))
    assert subs[-1] == phi
    assert Dep(("q",), "r") in subs


def test_theta_and_cardinality_shape(pq):
    assert theta_formula(Team.empty(pq)) == BOT
    x = Team.from_valuations(pq, ["00", "11"])
    th = theta_formula(x)
    assert to_text(th) == "~p & ~q | p & q"
    c = cardinality_formula(x, 2)
    assert c == And(th, Or(Dep((), "p") & Dep((), "q"), Dep((), "p") & Dep((), "q")))
    assert classify(c) is Fragment.PDL
    with pytest.raises(ValueError):
        cardinality_formula(x, 0)


def test_operators():
    assert (p & q) == And(p, q)
    assert (p | q) == Or(p, q)
    assert str(p & q) == "p & q"


def test_corpus_is_seeded_and_distinct():
    a = generate_corpus("p q", 2, "PDL", seed=3, count=30)
    b = generate_corpus(["p", "q"], 2, Fragment.PDL, seed=3, count=30)
    assert a == b
    assert len(a) == len(set(a)) == 30
    assert all(depth(f) <= 2 and variables(f) <= {"p", "q"} for f in a)
    assert all(classify(f) in (Fragment.PL, Fragment.PDL) for f in a)
    assert generate_corpus("p q", 2, "PDL", seed=4, count=30) != a
    assert all(classify(f) in (Fragment.PL, Fragment.PINCL)
               for f in generate_corpus("p q", 2, "PIncl", seed=0))


def test_corpus_exhaustion():
    small = generate_corpus("p", 0, "PL", seed=0, count=40)
    assert set(small) == {p, NegLiteral("p"), TOP, BOT}
