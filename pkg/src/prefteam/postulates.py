"""KLM rule audits and the structural conditions that decide System P.

``audit`` instantiates each rule over all ordered tuples of a formula corpus.
The triangle condition asks every state with a non-singleton label to have a
strictly preferred state labelled by a proper subteam; the star condition asks
the minimal models of a disjunction to be minimal models of a disjunct.  For
dependence-logic models the two conditions coincide and are equivalent to
System P; when the triangle condition fails, :func:`or_counterexample` builds
an explicit (Or) failure from the offending team.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from prefteam import _kernels
from prefteam.errors import DomainError, FragmentError, PreconditionError
from prefteam.preferential import PreferentialModel, _bits, singleton_projection
from prefteam.semantics import entails, equivalent, mod_set
from prefteam.syntax import (
    And,
    Formula,
    Fragment,
    NegLiteral,
    Or,
    PosLiteral,
    cardinality_formula,
    classify,
    flatten,
    generate_corpus,
    theta_formula,
    variables,
)
from prefteam.teams import Team, TeamDomain, enumerate_teams


class RuleId(enum.Enum):
    REF = "Ref"
    LLE = "LLE"
    RW = "RW"
    CUT = "Cut"
    CM = "CM"
    OR = "Or"

    def __str__(self) -> str:
        return self.value


SYSTEM_C = (RuleId.REF, RuleId.LLE, RuleId.RW, RuleId.CUT, RuleId.CM)
SYSTEM_P = SYSTEM_C + (RuleId.OR,)
SYSTEMS = {"C": SYSTEM_C, "P": SYSTEM_P}


@dataclass(frozen=True)
class Violation:
    """One failing instance of a rule; unused rule variables are ``None``."""

    rule: RuleId
    alpha: Formula
    beta: Formula | None
    gamma: Formula | None
    witness_states: tuple[Hashable, ...] = ()
    witness_teams: tuple[Team, ...] = ()

    def conclusion(self) -> tuple[Formula, Formula]:
        a, b, c = self.alpha, self.beta, self.gamma
        return {
            RuleId.REF: (a, a),
            RuleId.LLE: (b, c),
            RuleId.RW: (c, b),
            RuleId.CUT: (a, c),
            RuleId.CM: (And(a, b), c),
            RuleId.OR: (Or(a, b), c),
        }[self.rule]

    def reverify(self, model: PreferentialModel) -> bool:
        """Premises hold and the conclusion fails, via the public entailment
        operations."""
        a, b, c = self.alpha, self.beta, self.gamma
        nm = model.entails
        d = model.domain
        premises = {
            RuleId.REF: True,
            RuleId.LLE: self.rule is RuleId.LLE and equivalent(a, b, d) and nm(a, c).holds,
            RuleId.RW: self.rule is RuleId.RW and entails(a, b, d) and nm(c, a).holds,
            RuleId.CUT: self.rule is RuleId.CUT and nm(And(a, b), c).holds and nm(a, b).holds,
            RuleId.CM: self.rule is RuleId.CM and nm(a, b).holds and nm(a, c).holds,
            RuleId.OR: self.rule is RuleId.OR and nm(a, c).holds and nm(b, c).holds,
        }[self.rule]
        lhs, rhs = self.conclusion()
        return bool(premises) and not nm(lhs, rhs).holds

    def instantiation(self) -> tuple[Formula, ...]:
        return tuple(f for f in (self.alpha, self.beta, self.gamma) if f is not None)


@dataclass
class RuleVerdict:
    rule: RuleId
    instances: int = 0
    count: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.count == 0


@dataclass
class AuditReport:
    system: str
    corpus_size: int
    rules: dict[RuleId, RuleVerdict]

    @property
    def ok(self) -> bool:
        return all(v.holds for v in self.rules.values())

    def violated(self) -> list[RuleId]:
        return [r for r, v in self.rules.items() if not v.holds]


class _Table:
    """Pre-computed state sets and entailment bitmasks for a corpus."""

    def __init__(self, model: PreferentialModel, corpus: Sequence[Formula]):
        self.model = model
        self.corpus = list(corpus)
        k = len(self.corpus)
        self.sat = [model.sat_mask(f) for f in self.corpus]
        self.fam = [mod_set(f, model.domain).to_int() for f in self.corpus]
        self.nm = [self.consequences(model.min_mask(s)) for s in self.sat]
        self.k = k

    def consequences(self, mins: int) -> int:
        """Bitmask over corpus positions of the formulas holding in all ``mins``."""
        return sum(1 << g for g, s in enumerate(self.sat) if not mins & ~s)

    def conj(self, a: int, b: int) -> int:
        return self.consequences(self.model.min_mask(self.sat[a] & self.sat[b]))

    def disj(self, a: int, b: int) -> int:
        s = self.model.sat_mask(Or(self.corpus[a], self.corpus[b]))
        return self.consequences(self.model.min_mask(s))

    def entailed(self, a: int) -> int:
        fa = self.fam[a]
        return sum(1 << b for b, fb in enumerate(self.fam) if not fa & ~fb)


def audit(model: PreferentialModel, corpus: Sequence[Formula], system: str = "P",
          max_violations: int = 5) -> AuditReport:
    """Check the rules of System C or P over every corpus instantiation.

    Violations are listed in lexicographic order of the corpus positions of
    (alpha, beta, gamma); at most ``max_violations`` per rule are kept, the
    total being in ``count``.
    """
    try:
        rules = SYSTEMS[system.upper()]
    except KeyError:
        raise ValueError(f"unknown system {system!r}; use 'C' or 'P'") from None
    for f in corpus:
        if not variables(f) <= set(model.domain.variables):
            raise DomainError(f"corpus formula {f} uses variables outside {model.domain}")
    t = _Table(model, corpus)
    k = t.k
    found: dict[RuleId, list[tuple[int, int | None, int | None]]] = {r: [] for r in rules}
    verdicts = {r: RuleVerdict(r) for r in rules}

    def record(rule, a, b, mask):
        for g in _bits(mask):
            found[rule].append((a, b, g))

    if RuleId.REF in rules:
        verdicts[RuleId.REF].instances = k
        for a in range(k):
            if not (t.nm[a] >> a) & 1:
                found[RuleId.REF].append((a, None, None))
    if RuleId.LLE in rules:
        verdicts[RuleId.LLE].instances = k * k * k
        for a in range(k):
            for b in range(k):
                if t.fam[a] == t.fam[b]:
                    record(RuleId.LLE, a, b, t.nm[a] & ~t.nm[b])
    if RuleId.RW in rules:
        verdicts[RuleId.RW].instances = k * k * k
        ent = [t.entailed(a) for a in range(k)]
        for a in range(k):
            for b in _bits(ent[a]):
                for g in range(k):
                    if (t.nm[g] >> a) & 1 and not (t.nm[g] >> b) & 1:
                        found[RuleId.RW].append((a, b, g))
    if RuleId.CUT in rules or RuleId.CM in rules:
        for r in (RuleId.CUT, RuleId.CM):
            if r in rules:
                verdicts[r].instances = k * k * k
        for a in range(k):
            for b in range(k):
                if not (t.nm[a] >> b) & 1:
                    continue
                nc = t.conj(a, b)
                if RuleId.CUT in rules:
                    record(RuleId.CUT, a, b, nc & ~t.nm[a])
                if RuleId.CM in rules:
                    record(RuleId.CM, a, b, t.nm[a] & ~nc)
    if RuleId.OR in rules:
        verdicts[RuleId.OR].instances = k * k * k
        for a in range(k):
            for b in range(k):
                common = t.nm[a] & t.nm[b]
                if common:
                    record(RuleId.OR, a, b, common & ~t.disj(a, b))

    c = t.corpus
    for rule in rules:
        hits = sorted(found[rule], key=lambda x: tuple(-1 if v is None else v for v in x))
        v = verdicts[rule]
        v.count = len(hits)
        for a, b, g in hits[:max_violations]:
            viol = Violation(rule, c[a], None if b is None else c[b], None if g is None else c[g])
            lhs, rhs = viol.conclusion()
            res = model.entails(lhs, rhs)
            v.violations.append(Violation(rule, viol.alpha, viol.beta, viol.gamma,
                                          res.witnesses, res.witness_teams))
    return AuditReport(system.upper(), k, verdicts)


def literal_corpus(domain: TeamDomain, depth: int = 2, fragment: Fragment | str = Fragment.PDL,
                   seed: int = 0, count: int = 40) -> list[Formula]:
    """Audit corpus: every literal of the domain, then seeded random formulas,
    ``count`` formulas in total."""
    lits: list[Formula] = []
    for v in domain.variables:
        lits += [PosLiteral(v), NegLiteral(v)]
    out = dict.fromkeys(lits[:count])
    extra = generate_corpus(domain.variables, depth, fragment, seed, count)
    for f in extra:
        if len(out) >= count:
            break
        out.setdefault(f, None)
    return list(out)


# ---------------------------------------------------------------------------
# Monotone entailment

def monotone_or_violations(corpus: Sequence[Formula], domain: TeamDomain,
                           limit: int | None = None) -> list[tuple[Formula, Formula, Formula, Team]]:
    """Instances of (Or) failing for team entailment, each with a team that
    satisfies the disjunction but not the conclusion."""
    fams = [mod_set(f, domain).to_int() for f in corpus]
    out = []
    k = len(corpus)
    for a in range(k):
        for b in range(k):
            for g in range(k):
                if fams[a] & ~fams[g] or fams[b] & ~fams[g]:
                    continue
                fd = mod_set(Or(corpus[a], corpus[b]), domain).to_int()
                bad = fd & ~fams[g]
                if bad:
                    out.append((corpus[a], corpus[b], corpus[g],
                                Team(domain, (bad & -bad).bit_length() - 1)))
                    if limit is not None and len(out) >= limit:
                        return out
    return out


# ---------------------------------------------------------------------------
# Structural conditions

@dataclass(frozen=True)
class TriangleResult:
    holds: bool
    witness: Hashable | None = None
    witness_team: Team | None = None
    violators: tuple[Hashable, ...] = ()

    def __bool__(self) -> bool:
        return self.holds


def triangle_violators(model: PreferentialModel) -> int:
    """Bitmask of states with a non-singleton label and no strictly preferred
    state labelled by a proper subteam."""
    labels = model.labels
    big = [i for i, b in enumerate(labels) if b.bit_count() > 1]
    if not big:
        return 0
    kind = model.order_kind
    if kind in ("superset", "discrete"):
        return sum(1 << i for i in big)
    if kind == "subset":
        fam = np.zeros(model.domain.num_teams, dtype=np.uint8)
        fam[np.asarray(labels, dtype=np.int64)] = 1
        sub = _kernels.strict_down_exists(fam, model.domain.num_valuations)
        return sum(1 << i for i in big if not sub[labels[i]])
    out = 0
    for i in big:
        li = labels[i]
        if not any(labels[j] != li and labels[j] & ~li == 0 for j in _bits(model.below[i])):
            out |= 1 << i
    return out


def check_triangle(model: PreferentialModel) -> TriangleResult:
    """The triangle condition.  On failure the witness is the first violator
    that is order-minimal among all violators."""
    bad = triangle_violators(model)
    if not bad:
        return TriangleResult(True)
    first = _bits(model.min_mask(bad))[0]
    return TriangleResult(False, model.states[first], Team(model.domain, model.labels[first]),
                          tuple(model.states[i] for i in _bits(bad)))


@dataclass(frozen=True)
class StarResult:
    holds: bool
    witness_teams: tuple[Team, ...] = ()

    def __bool__(self) -> bool:
        return self.holds


def _min_labels(model: PreferentialModel, phi: Formula) -> set[int]:
    return {model.labels[i] for i in _bits(model.min_mask(model.sat_mask(phi)))}


def check_star(model: PreferentialModel, a: Formula, b: Formula) -> StarResult:
    """Teams labelling minimal states of ``a | b`` label minimal states of
    ``a`` or of ``b``."""
    lhs = _min_labels(model, Or(a, b))
    rhs = _min_labels(model, a) | _min_labels(model, b)
    extra = sorted(lhs - rhs)
    return StarResult(not extra, tuple(Team(model.domain, x) for x in extra))


def theta_pairs(domain: TeamDomain) -> list[tuple[Formula, Formula]]:
    """All pairs of subteam-defining formulas, one per pair of teams."""
    thetas = [theta_formula(t) for t in enumerate_teams(domain)]
    return [(x, y) for x in thetas for y in thetas]


def check_star_thetas(model: PreferentialModel) -> tuple[bool, tuple[Team, Team] | None]:
    """The star condition for every pair of subteam-defining formulas.

    A team satisfies ``theta(X) | theta(Y)`` exactly when it is a subteam of
    ``X | Y``, so the minimal labels only need computing once per team.
    Returns the verdict and, on failure, the first failing pair of teams.
    """
    d = model.domain
    below_team = [0] * d.num_teams
    for i, lab in enumerate(model.labels):
        below_team[lab] |= 1 << i
    # states whose label is a subteam of U, for every team U
    sub_states = list(below_team)
    for v in range(d.num_valuations):
        bit = 1 << v
        for u in range(d.num_teams):
            if u & bit:
                sub_states[u] |= sub_states[u ^ bit]
    mins = [frozenset(model.labels[i] for i in _bits(model.min_mask(m))) for m in sub_states]
    for x in range(d.num_teams):
        for y in range(d.num_teams):
            if not mins[x | y] <= mins[x] | mins[y]:
                return False, (Team(d, x), Team(d, y))
    return True, None


@dataclass(frozen=True)
class OrCounterexample:
    alpha: Formula
    beta: Formula
    gamma: Formula
    team: Team
    verified: bool
    witness_teams: tuple[Team, ...] = ()


def or_counterexample(model: PreferentialModel) -> OrCounterexample | None:
    """Explicit (Or) failure built from a triangle violation, or ``None`` when
    the triangle condition holds.

    With ``X`` the violating team and ``|X| = l + k`` (``l = |X| // 2``):
    ``alpha`` / ``beta`` define the subteams of ``X`` with at most ``l`` /
    ``k`` members, and ``alpha |~ beta``, ``beta |~ beta`` but not
    ``alpha | beta |~ beta``.
    """
    tri = check_triangle(model)
    if tri.holds:
        return None
    team = tri.witness_team
    j = len(team)
    low = j // 2
    alpha = cardinality_formula(team, low)
    beta = cardinality_formula(team, j - low)
    gamma = beta
    concl = model.entails(Or(alpha, beta), gamma)
    verified = (model.entails(alpha, gamma).holds and model.entails(beta, gamma).holds
                and not concl.holds and team in concl.witness_teams)
    return OrCounterexample(alpha, beta, gamma, team, verified, concl.witness_teams)


# ---------------------------------------------------------------------------
# Cross-checks

@dataclass
class TheoremMainReport:
    triangle: bool
    star: bool
    corpus_system_p: bool
    system_c: bool
    counterexample: OrCounterexample | None
    triangle_witness: Team | None = None
    star_witness: tuple[Formula, Formula] | None = None
    audit: AuditReport | None = None
    inconsistencies: list[str] = field(default_factory=list)

    @property
    def system_p(self) -> bool:
        return self.corpus_system_p and self.counterexample is None

    @property
    def consistent(self) -> bool:
        return not self.inconsistencies


def verify_theorem_main(model: PreferentialModel, corpus: Sequence[Formula],
                        star_samples: Iterable[tuple[Formula, Formula]] | None = None
                        ) -> TheoremMainReport:
    """Cross-check the triangle condition, the star condition on samples, a
    System P corpus audit and the constructive (Or) failure.

    Without explicit ``star_samples`` all pairs of subteam-defining formulas
    are used.  Checked implications: triangle iff star, star implies the corpus audit
    passes, System C always passes, and a triangle failure yields a verified
    (Or) counterexample.
    """
    tri = check_triangle(model)
    star = True
    star_witness = None
    if star_samples is None:
        star, pair = check_star_thetas(model)
        if pair is not None:
            star_witness = (theta_formula(pair[0]), theta_formula(pair[1]))
    else:
        for a, b in star_samples:
            if not check_star(model, a, b):
                star, star_witness = False, (a, b)
                break
    report = audit(model, corpus, "P")
    corpus_p = report.ok
    system_c = all(report.rules[r].holds for r in SYSTEM_C)
    cex = or_counterexample(model)
    out = TheoremMainReport(tri.holds, star, corpus_p, system_c, cex, tri.witness_team,
                            star_witness, report)
    if tri.holds != star:
        out.inconsistencies.append(f"triangle={tri.holds} but star={star}")
    if star and not corpus_p:
        out.inconsistencies.append(
            "star holds but the corpus audit violates " + ", ".join(map(str, report.violated())))
    if not system_c:
        out.inconsistencies.append("System C violated on the corpus")
    if not tri.holds and (cex is None or not cex.verified):
        out.inconsistencies.append("triangle fails but no verified (Or) counterexample was built")
    return out


@dataclass
class FlatteningReport:
    total: int
    agree: int
    disagreements: list[tuple[Formula, Formula, bool, bool]] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return self.agree / self.total if self.total else 1.0

    @property
    def ok(self) -> bool:
        return self.agree == self.total


def verify_flattening_theorem(model: PreferentialModel,
                              pairs: Iterable[tuple[Formula, Formula]],
                              max_listed: int = 10) -> FlatteningReport:
    """Compare ``A |~ B`` in ``model`` with ``flat(A) |~ flat(B)`` in the
    classical model of its singleton-labelled states."""
    if not check_triangle(model).holds:
        raise PreconditionError("flattening correspondence needs the triangle condition")
    classical = singleton_projection(model)
    total = agree = 0
    out = FlatteningReport(0, 0)
    for a, b in pairs:
        for f in (a, b):
            if classify(f) not in (Fragment.PL, Fragment.PDL):
                raise FragmentError(f"flattening needs dependence-logic formulas, got {f}")
        team_side = model.entails(a, b).holds
        flat_side = classical.entails(flatten(a), flatten(b))
        total += 1
        if team_side == flat_side:
            agree += 1
        elif len(out.disagreements) < max_listed:
            out.disagreements.append((a, b, team_side, flat_side))
    out.total, out.agree = total, agree
    return out

