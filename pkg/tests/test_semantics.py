import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _strategies import formulas, teams
from prefteam.errors import DomainError, DomainTooLargeError, FragmentError
from prefteam.semantics import (
    STRATEGIES,
    _satisfies_direct,
    check_closure_properties,
    classical_entails,
    classical_models,
    classical_truth,
    closure_flags,
    entails,
    equivalent,
    mod_set,
    satisfies,
    satisfies_reference,
)
from prefteam.syntax import Dep, Fragment, Or, classify, flatten, parse, theta_formula
from prefteam.teams import Team, TeamDomain, enumerate_teams

PQ = TeamDomain.of("p q")
PQR = TeamDomain.of("p q r")


# A two-member team that is not constant in p ------------------------------

@pytest.mark.parametrize(
    "text, expected",
    [("=(p;q)", True), ("=(;r)", True), ("=(;p)", False), ("=(;p) | =(;p)", True)],
)
@pytest.mark.parametrize("strategy", STRATEGIES)
def test_split_team_verdicts(split_team, text, expected, strategy):
    phi = parse(text)
    assert satisfies(split_team, phi, strategy) is expected
    assert satisfies_reference(split_team, phi) is expected


# Frozen values, computed with the cover-search reference evaluator ---------

FROZEN = {
    "=(p;q)": [0, 1, 2, 3, 4, 6, 8, 9, 12],
    "inc(p;q)": [0, 1, 5, 6, 7, 8, 9, 10, 11, 13, 14, 15],
    "=(;p) | =(;q)": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14],
    "=(;p) | =(;p)": list(range(16)),
    "inc(p q;q p)": [0, 1, 6, 7, 8, 9, 14, 15],
    "(p | q) & =(;p)": [0, 2, 4, 8, 10],
}


@pytest.mark.parametrize("text", sorted(FROZEN))
def test_frozen_model_sets(text):
    assert mod_set(parse(text), PQ).encodings() == FROZEN[text]


def test_constancy_over_one_variable():
    d = TeamDomain.of("p")
    assert mod_set(Dep((), "p"), d).encodings() == [0, 1, 2]


# Oracle agreement -----------------------------------------------------------

@given(formulas(["p", "q"], "Mixed", max_leaves=7), st.sampled_from(STRATEGIES))
@settings(max_examples=150, deadline=None)
def test_mod_set_matches_reference(phi, strategy):
    expect = [t.bits for t in enumerate_teams(PQ) if satisfies_reference(t, phi)]
    assert mod_set(phi, PQ, strategy).encodings() == expect


@given(formulas(["p", "q", "r"], "Mixed", max_leaves=6), teams(PQR))
@settings(max_examples=150, deadline=None)
def test_satisfies_matches_reference(phi, team):
    assert satisfies(team, phi) == satisfies_reference(team, phi)
    assert satisfies(team, phi) == (team in mod_set(phi, PQR))


def test_large_teams():
    d = TeamDomain.of("a b c d e")
    full = Team.full(d)
    assert satisfies(full, parse("a | ~a"))
    assert not satisfies(full, parse("a | b"))
    assert satisfies(Team(d, full.bits & ~1), parse("a | b | c | d | e"))
    assert not satisfies(full, parse("=(;a)"))
    assert satisfies(full, parse("=(a b c d e; a) & inc(a; b)"))
    # the classical disjunct absorbs every a-member, the rest is constant in a
    assert satisfies(full, parse("a | =(;a)"))
    assert not satisfies(full, parse("b | =(;a)"))
    with pytest.raises(DomainTooLargeError):
        satisfies(full, parse("=(;a) | =(;a)"))


@given(formulas(["p", "q", "r"], "Mixed", max_leaves=6), teams(PQR))
@settings(max_examples=200, deadline=None)
def test_direct_evaluator_matches_lattice(phi, team):
    try:
        direct = _satisfies_direct(team.bits, phi, PQR)
    except DomainTooLargeError:
        return
    assert direct == satisfies(team, phi)


def test_domain_checks():
    with pytest.raises(DomainError):
        mod_set(parse("s"), PQ)
    with pytest.raises(DomainError):
        satisfies(Team.full(PQ), parse("r"))
    with pytest.raises(DomainTooLargeError):
        mod_set(parse("a"), TeamDomain.of("a b c d e"))
    with pytest.raises(ValueError):
        mod_set(parse("p | q"), PQ, "fastest")


# Closure properties ---------------------------------------------------------

@given(formulas(["p", "q"], "PL"), teams(PQ))
def test_flatness(phi, team):
    pointwise = all(satisfies(Team(PQ, 1 << k), phi) for k in team.members())
    assert satisfies(team, phi) == pointwise


@given(formulas(["p", "q"], "PDL"))
def test_downward_closure(phi):
    rep = check_closure_properties(phi, PQ)
    assert rep.downward_closed and rep.empty_team


@given(formulas(["p", "q"], "PIncl"))
def test_union_closure(phi):
    rep = check_closure_properties(phi, PQ)
    assert rep.union_closed and rep.empty_team


@given(formulas(["p", "q"], "PL"))
def test_pl_has_all_closure_properties(phi):
    assert all(check_closure_properties(phi, PQ).as_dict().values())


def test_closure_flags_detect_failures():
    assert not check_closure_properties(parse("=(;p)"), PQ).union_closed
    assert not check_closure_properties(parse("=(;p)"), PQ).flat
    assert not check_closure_properties(parse("inc(p;q)"), PQ).downward_closed
    # a family without the empty team
    rep = closure_flags([False, True, True, True], 2)
    assert not rep.empty_team and rep.union_closed and not rep.downward_closed


def test_theta_defines_subteams():
    for x in enumerate_teams(PQ):
        assert mod_set(theta_formula(x), PQ).encodings() == [t.bits for t in x.subteams()]


# Entailment -----------------------------------------------------------------

def test_or_of_constancy_is_not_constancy():
    a = parse("=(;p)")
    assert entails(a, Or(a, a), PQR)
    assert not entails(Or(a, a), a, PQR)
    assert not equivalent(a, Or(a, a), PQR)
    assert equivalent(parse("p & q"), parse("q & p"), PQR)


@given(formulas(["p", "q"], "PL"), formulas(["p", "q"], "PL"))
def test_team_entailment_is_classical_on_pl(a, b):
    assert entails(a, b, PQ) == classical_entails(a, b, PQ)


@given(formulas(["p", "q"], "PDL"))
def test_flattening_is_weaker(phi):
    assert entails(phi, flatten(phi), PQ)


def test_classical_helpers():
    assert classical_models(parse("p | q"), PQ) == 0b1110
    assert classical_truth(parse("~p & q"), PQ, 2)
    assert classical_models(parse("bot"), PQ) == 0
    with pytest.raises(FragmentError):
        classical_models(parse("=(;p)"), PQ)
    with pytest.raises(FragmentError):
        classical_truth(parse("inc(p;q)"), PQ, 0)
    assert classify(parse("p")) is Fragment.PL
