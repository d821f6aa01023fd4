import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefteam.errors import FragmentError, PreconditionError
from prefteam.postulates import (
    SYSTEM_C,
    SYSTEM_P,
    RuleId,
    audit,
    check_star,
    check_star_thetas,
    check_triangle,
    literal_corpus,
    monotone_or_violations,
    or_counterexample,
    theta_pairs,
    verify_flattening_theorem,
    verify_theorem_main,
)
from prefteam.preferential import build_builtin, entails_nm, load_model, random_standard_model
from prefteam.semantics import entails, equivalent, mod_set
from prefteam.syntax import And, Dep, Or, cardinality_formula, generate_corpus, parse, theta_formula
from prefteam.teams import Team, TeamDomain

PQ = TeamDomain.of("p q")
PQR = TeamDomain.of("p q r")


def naive_counts(w, corpus):
    """Rule violations counted straight from the rule definitions."""
    nm = lambda a, b: entails_nm(w, a, b).holds
    out = dict.fromkeys(SYSTEM_P, 0)
    for a in corpus:
        out[RuleId.REF] += not nm(a, a)
    for a, b, c in itertools.product(corpus, repeat=3):
        out[RuleId.LLE] += equivalent(a, b, PQ) and nm(a, c) and not nm(b, c)
        out[RuleId.RW] += entails(a, b, PQ) and nm(c, a) and not nm(c, b)
        out[RuleId.CUT] += nm(And(a, b), c) and nm(a, b) and not nm(a, c)
        out[RuleId.CM] += nm(a, b) and nm(a, c) and not nm(And(a, b), c)
        out[RuleId.OR] += nm(a, c) and nm(b, c) and not nm(Or(a, b), c)
    return out


def test_system_membership():
    assert [str(r) for r in SYSTEM_C] == ["Ref", "LLE", "RW", "Cut", "CM"]
    assert SYSTEM_P == SYSTEM_C + (RuleId.OR,)


def test_pq_violates_or(w_pq):
    corpus = [parse(s) for s in ("p", "~p", "q")]
    rep = audit(w_pq, corpus, "P")
    assert rep.violated() == [RuleId.OR]
    first = rep.rules[RuleId.OR].violations[0]
    assert (first.alpha, first.beta, first.gamma) == tuple(corpus)
    assert first.witness_teams == (Team.from_valuations(PQ, ["00", "11"]),)
    assert all(v.reverify(w_pq) for v in rep.rules[RuleId.OR].violations)


@pytest.mark.parametrize("model", ["builtin:pq", "builtin:sub", "builtin:sup",
                                   "builtin:discrete", "random:3", "random:8"])
def test_audit_matches_naive_count(model):
    w = load_model(model, PQ)
    corpus = literal_corpus(PQ, 2, "PDL", seed=1, count=9)
    rep = audit(w, corpus, "P", max_violations=1000)
    counts = naive_counts(w, corpus)
    assert {r: v.count for r, v in rep.rules.items()} == counts
    for v in rep.rules.values():
        assert all(x.reverify(w) for x in v.violations)


@pytest.mark.parametrize("name", ["pq", "sub", "sup", "discrete"])
def test_system_c_always_holds(name):
    rep = audit(build_builtin(name, PQ), literal_corpus(PQ, 2, "PDL", seed=0), "C")
    assert rep.ok and set(rep.rules) == set(SYSTEM_C)


@given(st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_system_c_random_models(seed):
    w = random_standard_model(PQ, seed, edge_prob=0.4)
    assert audit(w, literal_corpus(PQ, 2, "Mixed", seed=seed, count=25), "C").ok


def test_sub_satisfies_system_p(w_sub):
    assert audit(w_sub, literal_corpus(PQ, 2, "PDL", seed=2), "P").ok


def test_audit_arguments(w_sub):
    with pytest.raises(ValueError):
        audit(w_sub, [parse("p")], "Q")
    with pytest.raises(Exception):
        audit(w_sub, [parse("r")], "P")


def test_violation_limit(w_pq):
    rep = audit(w_pq, literal_corpus(PQ, 2, "PDL", seed=7), "P", max_violations=2)
    v = rep.rules[RuleId.OR]
    assert len(v.violations) == 2 and v.count > 2


# Structural conditions ----------------------------------------------------

def test_triangle_builtins(w_pq, w_sub, w_sup, w_peng):
    assert check_triangle(w_sub).holds
    assert check_triangle(w_peng).holds
    assert not check_triangle(w_sup).holds
    assert not check_triangle(build_builtin("discrete", PQ)).holds
    res = check_triangle(w_pq)
    assert not res.holds
    assert res.witness_team == Team.from_valuations(PQ, ["00", "11"])


def brute_triangle(w):
    for s in w.states:
        x = w.label(s)
        if len(x) > 1 and not any(w.label(t) < x and w.precedes(t, s) for t in w.states):
            return False
    return True


@given(st.integers(0, 10_000), st.sampled_from([0.3, 0.6, 0.9]),
       st.sampled_from(["random", "cardinality"]))
@settings(max_examples=40, deadline=None)
def test_triangle_matches_definition(seed, prob, ordering):
    w = random_standard_model(PQ, seed, prob, ordering)
    res = check_triangle(w)
    assert res.holds == brute_triangle(w)
    if not res.holds:
        # the witness is a violator with no violator below it
        assert res.witness in res.violators
        assert not any(w.precedes(v, res.witness) for v in res.violators)


def test_star_sup_counterexample(w_sup, w_sub):
    a = Dep((), "p")
    res = check_star(w_sup, a, a)
    assert not res.holds and res.witness_teams == (Team.full(PQ),)
    assert check_star(w_sub, a, a).holds


@given(st.integers(0, 10_000), st.sampled_from([0.3, 0.6]),
       st.sampled_from(["random", "cardinality"]))
@settings(max_examples=15, deadline=None)
def test_star_fast_path_agrees(seed, prob, ordering):
    w = random_standard_model(PQ, seed, prob, ordering)
    slow = all(check_star(w, a, b) for a, b in theta_pairs(PQ))
    fast, pair = check_star_thetas(w)
    assert fast == slow == check_triangle(w).holds
    if pair is not None:
        assert not check_star(w, theta_formula(pair[0]), theta_formula(pair[1]))


def test_theta_pairs():
    assert len(theta_pairs(PQ)) == 256


# (Or) counterexamples -------------------------------------------------------

def test_or_counterexample_pq(w_pq):
    c = or_counterexample(w_pq)
    x = Team.from_valuations(PQ, ["00", "11"])
    assert c.team == x and c.verified
    assert c.alpha == c.beta == c.gamma == cardinality_formula(x, 1)
    assert not entails_nm(w_pq, Or(c.alpha, c.beta), c.gamma).holds
    assert x in c.witness_teams


def test_or_counterexample_none_with_triangle(w_sub, w_peng):
    assert or_counterexample(w_sub) is None
    assert or_counterexample(w_peng) is None


@given(st.integers(0, 10_000), st.sampled_from(["random", "cardinality"]))
@settings(max_examples=25, deadline=None)
def test_or_counterexample_random(seed, ordering):
    w = random_standard_model(PQ, seed, 0.5, ordering)
    c = or_counterexample(w)
    assert (c is None) == check_triangle(w).holds
    if c is not None:
        assert c.verified
        assert entails_nm(w, c.alpha, c.gamma).holds
        assert entails_nm(w, c.beta, c.gamma).holds


def test_or_counterexample_larger_team():
    d = TeamDomain.of("b p f")
    w = build_builtin("sup", d)
    c = or_counterexample(w)
    assert c.verified and len(c.team) >= 2


# Monotone entailment ------------------------------------------------------

def test_monotone_or_fails_for_dependence(split_team):
    a = Dep((), "p")
    found = monotone_or_violations([a], PQR)
    assert len(found) == 1
    _, _, _, team = found[0]
    assert team in mod_set(Or(a, a), PQR) and team not in mod_set(a, PQR)
    assert split_team in mod_set(Or(a, a), PQR) and split_team not in mod_set(a, PQR)


@pytest.mark.parametrize("fragment", ["PL", "PIncl"])
def test_monotone_or_holds_for_union_closed(fragment):
    corpus = generate_corpus("p q", 2, fragment, seed=5, count=25)
    assert monotone_or_violations(corpus, PQ) == []


# Cross-checks ---------------------------------------------------------------

@pytest.mark.parametrize("name, system_p", [("sub", True), ("sup", False),
                                            ("discrete", False), ("pq", False)])
def test_verify_theorem_main_builtins(name, system_p):
    rep = verify_theorem_main(build_builtin(name, PQ), literal_corpus(PQ, 2, "PDL", seed=0))
    assert rep.consistent, rep.inconsistencies
    assert rep.system_p is system_p
    assert rep.triangle is rep.star is system_p


def test_verify_theorem_main_explicit_samples(w_sup):
    rep = verify_theorem_main(w_sup, [parse("p")], star_samples=[(Dep((), "p"), Dep((), "p"))])
    assert not rep.star and rep.star_witness == (Dep((), "p"), Dep((), "p"))


def test_flattening_sub(w_sub):
    corpus = literal_corpus(PQ, 2, "PDL", seed=4, count=20)
    rep = verify_flattening_theorem(w_sub, [(a, b) for a in corpus for b in corpus])
    assert rep.ok and rep.total == 400 and rep.rate == 1.0


def test_flattening_preconditions(w_sup, w_sub):
    with pytest.raises(PreconditionError):
        verify_flattening_theorem(w_sup, [(parse("p"), parse("q"))])
    with pytest.raises(FragmentError):
        verify_flattening_theorem(w_sub, [(parse("inc(p;q)"), parse("q"))])


def test_sup_matches_team_entailment(w_sup):
    corpus = literal_corpus(PQ, 2, "PDL", seed=9, count=20)
    for a in corpus:
        for b in corpus:
            assert entails_nm(w_sup, a, b).holds == entails(a, b, PQ)
