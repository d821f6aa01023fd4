"""Team satisfaction, model sets and (monotone) entailment.

Every formula is compiled to a small instruction list over a finite universe
of valuations and evaluated on *all* subteams of that universe at once by the
kernels in :mod:`prefteam._kernels`.  For :func:`mod_set` the universe is the
whole valuation space of the domain; for a single :func:`satisfies` query it
is the members of the queried team.

Disjunction is evaluated with one of three strategies:

``cover``
    the defining clause: X is a union of a left model and a right model;
``partition``
    disjoint splits only, valid when both disjuncts are downward closed;
``union``
    the largest left-subteam and largest right-subteam of X together give X,
    valid when both disjuncts are union closed.

``auto`` picks ``union`` if both disjuncts are union closed, else
``partition`` if both are downward closed, else ``cover``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from prefteam import _kernels
from prefteam._kernels.opcodes import (
    OP_AND,
    OP_BOT,
    OP_DEP,
    OP_INC,
    OP_LIT,
    OP_OR_COVER,
    OP_OR_PARTITION,
    OP_OR_UNION,
    OP_TOP,
)
from prefteam.errors import DomainError, DomainTooLargeError, FragmentError
from prefteam.syntax import (
    And,
    Bottom,
    Dep,
    Formula,
    Fragment,
    Inc,
    NegLiteral,
    Or,
    PosLiteral,
    Top,
    classify,
    variables,
)
from prefteam.teams import Team, TeamDomain, TeamFamily, split_masks

STRATEGIES = ("auto", "cover", "partition", "union")
MAX_LATTICE_POINTS = 16  # subteam lattice of at most 2**16 teams per query


def _check_vars(phi: Formula, domain: TeamDomain) -> None:
    missing = variables(phi) - set(domain.variables)
    if missing:
        raise DomainError(f"variables {sorted(missing)} not in domain {domain}")


@dataclass(frozen=True)
class Program:
    """A formula compiled against a universe of ``m`` valuations."""

    ops: np.ndarray
    lit_masks: np.ndarray
    dep_table: np.ndarray
    dep_groups: np.ndarray
    inc_table: np.ndarray
    inc_lv: np.ndarray
    inc_rv: np.ndarray
    m: int

    def run(self, backend=None) -> np.ndarray:
        kernels = backend or _kernels.backend
        return kernels.eval_program(self.ops, self.lit_masks, self.dep_table, self.dep_groups,
                                    self.inc_table, self.inc_lv, self.inc_rv, self.m)


def _or_opcode(strategy: str, left: Fragment, right: Fragment) -> int:
    union_ok = left.union_closed and right.union_closed
    down_ok = left.downward_closed and right.downward_closed
    if strategy == "auto":
        if union_ok:
            return OP_OR_UNION
        return OP_OR_PARTITION if down_ok else OP_OR_COVER
    if strategy == "partition" and down_ok:
        return OP_OR_PARTITION
    if strategy == "union" and union_ok:
        return OP_OR_UNION
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown disjunction strategy {strategy!r}")
    return OP_OR_COVER


def compile_formula(phi: Formula, domain: TeamDomain, universe: Sequence[int],
                    strategy: str = "auto") -> Program:
    """Compile ``phi`` for evaluation on the subteams of ``universe`` (a list of
    valuation indices)."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown disjunction strategy {strategy!r}")
    universe = list(universe)
    m = len(universe)
    if m > MAX_LATTICE_POINTS:
        raise DomainTooLargeError(f"subteam lattice over {m} valuations is too large")

    def point_mask(pred) -> int:
        return sum(1 << i for i, k in enumerate(universe) if pred(k))

    def value(k: int, names: Sequence[str]) -> tuple[int, ...]:
        return tuple((k >> domain.index(v)) & 1 for v in names)

    ops: list[tuple[int, int, int, int]] = []
    lit_masks: list[int] = []
    dep_table: list[tuple[int, int, int]] = []
    dep_groups: list[int] = []
    inc_table: list[int] = []
    inc_lv: list[int] = []
    inc_rv: list[int] = []
    seen: dict[Formula, tuple[int, Fragment]] = {}

    def emit(node: Formula) -> tuple[int, Fragment]:
        if node in seen:
            return seen[node]
        frag = Fragment.PL
        if isinstance(node, Bottom):
            ins = (OP_BOT, 0, 0, 0)
        elif isinstance(node, Top):
            ins = (OP_TOP, 0, 0, 0)
        elif isinstance(node, (PosLiteral, NegLiteral)):
            i = domain.index(node.var)
            want = 1 if isinstance(node, PosLiteral) else 0
            lit_masks.append(point_mask(lambda k: (k >> i) & 1 == want))
            ins = (OP_LIT, 0, 0, len(lit_masks) - 1)
        elif isinstance(node, Dep):
            frag = Fragment.PDL
            t = domain.index(node.target)
            groups: dict[tuple[int, ...], int] = {}
            for i, k in enumerate(universe):
                key = value(k, node.args)
                groups[key] = groups.get(key, 0) | (1 << i)
            dep_table.append((point_mask(lambda k: (k >> t) & 1), len(dep_groups), len(groups)))
            dep_groups.extend(groups[key] for key in sorted(groups))
            ins = (OP_DEP, 0, 0, len(dep_table) - 1)
        elif isinstance(node, Inc):
            frag = Fragment.PINCL
            lv = [value(k, node.lhs) for k in universe]
            rv = [value(k, node.rhs) for k in universe]
            # value tuples renumbered densely so the kernels can use 64-bit sets
            rank = {v: r for r, v in enumerate(sorted(set(lv) | set(rv)))}
            inc_table.append(len(inc_lv))
            inc_lv.extend(rank[v] for v in lv)
            inc_rv.extend(rank[v] for v in rv)
            ins = (OP_INC, 0, 0, len(inc_table) - 1)
        elif isinstance(node, (And, Or)):
            li, lf = emit(node.left)
            ri, rf = emit(node.right)
            frag = _join_fragments(lf, rf)
            if isinstance(node, And):
                ins = (OP_AND, li, ri, 0)
            else:
                ins = (_or_opcode(strategy, lf, rf), li, ri, 0)
        else:
            raise TypeError(f"not a formula: {node!r}")
        ops.append(ins)
        seen[node] = (len(ops) - 1, frag)
        return seen[node]

    emit(phi)
    return Program(
        ops=np.asarray(ops, dtype=np.int64).reshape(-1, 4),
        lit_masks=np.asarray(lit_masks or [0], dtype=np.int64),
        dep_table=np.asarray(dep_table or [(0, 0, 0)], dtype=np.int64).reshape(-1, 3),
        dep_groups=np.asarray(dep_groups or [0], dtype=np.int64),
        inc_table=np.asarray(inc_table or [0], dtype=np.int64),
        inc_lv=np.asarray(inc_lv or [0], dtype=np.int64),
        inc_rv=np.asarray(inc_rv or [0], dtype=np.int64),
        m=m,
    )


def _join_fragments(a: Fragment, b: Fragment) -> Fragment:
    kinds = {a, b} - {Fragment.PL}
    if not kinds:
        return Fragment.PL
    if len(kinds) == 1:
        return kinds.pop()
    return Fragment.MIXED


# ---------------------------------------------------------------------------
# Satisfaction

def satisfies(team: Team, phi: Formula, strategy: str = "auto") -> bool:
    """Does ``team`` satisfy ``phi``?"""
    _check_vars(phi, team.domain)
    members = team.members()
    if len(members) > MAX_LATTICE_POINTS:
        return _satisfies_direct(team.bits, phi, team.domain)
    values = compile_formula(phi, team.domain, members, strategy).run()
    return bool(values[(1 << len(members)) - 1])


def _dep_holds(bits: int, node: Dep, domain: TeamDomain) -> bool:
    seen: dict[tuple[int, ...], int] = {}
    t = domain.index(node.target)
    for k in _members(bits):
        key = tuple((k >> domain.index(v)) & 1 for v in node.args)
        if seen.setdefault(key, (k >> t) & 1) != (k >> t) & 1:
            return False
    return True


def _inc_holds(bits: int, node: Inc, domain: TeamDomain) -> bool:
    ks = _members(bits)
    lhs = {tuple((k >> domain.index(v)) & 1 for v in node.lhs) for k in ks}
    rhs = {tuple((k >> domain.index(v)) & 1 for v in node.rhs) for k in ks}
    return lhs <= rhs


def _members(bits: int) -> list[int]:
    return [k for k in range(bits.bit_length()) if (bits >> k) & 1]


def _satisfies_direct(bits: int, phi: Formula, domain: TeamDomain) -> bool:
    """Satisfaction on teams too large for the subteam lattice.

    Exact, but only for formulas whose disjunctions have a classical disjunct
    next to a downward-closed one: the classical side then takes exactly the
    members satisfying it.  Other disjunctions raise
    :class:`DomainTooLargeError`.
    """
    frag = classify(phi)
    if frag is Fragment.PL:
        return all(classical_truth(phi, domain, k) for k in _members(bits))
    if isinstance(phi, Dep):
        return _dep_holds(bits, phi, domain)
    if isinstance(phi, Inc):
        return _inc_holds(bits, phi, domain)
    if isinstance(phi, And):
        return (_satisfies_direct(bits, phi.left, domain)
                and _satisfies_direct(bits, phi.right, domain))
    if isinstance(phi, Or):
        for flat, other in ((phi.left, phi.right), (phi.right, phi.left)):
            if classify(flat) is Fragment.PL and classify(other).downward_closed:
                rest = sum(1 << k for k in _members(bits) if not classical_truth(flat, domain, k))
                return _satisfies_direct(rest, other, domain)
    raise DomainTooLargeError(
        f"team has {bits.bit_count()} members; disjunction {phi} needs a split search, "
        f"supported up to {MAX_LATTICE_POINTS} members")


def satisfies_reference(team: Team, phi: Formula) -> bool:
    """Direct reading of the team-semantic clauses, disjunction by exhaustive
    cover search.  Slow; used as a test oracle."""
    _check_vars(phi, team.domain)
    domain = team.domain

    @functools.lru_cache(maxsize=None)
    def sat(bits: int, node: Formula) -> bool:
        members = [k for k in range(domain.num_valuations) if (bits >> k) & 1]
        if isinstance(node, Bottom):
            return bits == 0
        if isinstance(node, Top):
            return True
        if isinstance(node, PosLiteral):
            i = domain.index(node.var)
            return all((k >> i) & 1 for k in members)
        if isinstance(node, NegLiteral):
            i = domain.index(node.var)
            return not any((k >> i) & 1 for k in members)
        if isinstance(node, And):
            return sat(bits, node.left) and sat(bits, node.right)
        if isinstance(node, Or):
            return any(sat(y, node.left) and sat(z, node.right)
                       for y, z in split_masks(bits, "covers"))
        if isinstance(node, Dep):
            a = [domain.index(v) for v in node.args]
            b = domain.index(node.target)
            return all(
                (u >> b) & 1 == (w >> b) & 1
                for u in members for w in members
                if all((u >> i) & 1 == (w >> i) & 1 for i in a)
            )
        if isinstance(node, Inc):
            a = [domain.index(v) for v in node.lhs]
            b = [domain.index(v) for v in node.rhs]
            return all(
                any(all((u >> i) & 1 == (w >> j) & 1 for i, j in zip(a, b)) for w in members)
                for u in members
            )
        raise TypeError(f"not a formula: {node!r}")

    return sat(team.bits, phi)


# ---------------------------------------------------------------------------
# Model sets and entailment

@functools.lru_cache(maxsize=None)
def _mod_mask(phi: Formula, domain: TeamDomain, strategy: str) -> np.ndarray:
    prog = compile_formula(phi, domain, range(domain.num_valuations), strategy)
    out = prog.run().astype(bool)
    out.flags.writeable = False
    return out


def mod_set(phi: Formula, domain: TeamDomain, strategy: str = "auto") -> TeamFamily:
    """The family of all teams over ``domain`` satisfying ``phi`` (including
    the empty team).  Memoized per formula, domain and strategy."""
    domain.require_family_size()
    _check_vars(phi, domain)
    return TeamFamily(domain, _mod_mask(phi, domain, strategy))


def clear_cache() -> None:
    _mod_mask.cache_clear()


def entails(phi: Formula, psi: Formula, domain: TeamDomain) -> bool:
    """Monotone team entailment: every team satisfying ``phi`` satisfies ``psi``."""
    return mod_set(phi, domain).issubset(mod_set(psi, domain))


def equivalent(phi: Formula, psi: Formula, domain: TeamDomain) -> bool:
    return mod_set(phi, domain) == mod_set(psi, domain)


def classical_truth(phi: Formula, domain: TeamDomain, valuation: int) -> bool:
    """Truth of a classical formula under the valuation with the given index."""
    if isinstance(phi, PosLiteral):
        return bool((valuation >> domain.index(phi.var)) & 1)
    if isinstance(phi, NegLiteral):
        return not (valuation >> domain.index(phi.var)) & 1
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, And):
        return classical_truth(phi.left, domain, valuation) and classical_truth(phi.right, domain, valuation)
    if isinstance(phi, Or):
        return classical_truth(phi.left, domain, valuation) or classical_truth(phi.right, domain, valuation)
    raise FragmentError(f"classical truth is defined for PL formulas only, got {phi}")


def classical_models(phi: Formula, domain: TeamDomain) -> int:
    """Bitmask of the valuations satisfying a PL formula."""
    if classify(phi) is not Fragment.PL:
        raise FragmentError(f"not a PL formula: {phi}")
    _check_vars(phi, domain)
    return sum(1 << k for k in range(domain.num_valuations) if classical_truth(phi, domain, k))


def classical_entails(alpha: Formula, beta: Formula, domain: TeamDomain) -> bool:
    """Truth-table entailment between PL formulas."""
    a = classical_models(alpha, domain)
    b = classical_models(beta, domain)
    return a & ~b == 0


# ---------------------------------------------------------------------------
# Closure properties

@dataclass(frozen=True)
class ClosureReport:
    flat: bool
    downward_closed: bool
    union_closed: bool
    empty_team: bool

    def as_dict(self) -> dict[str, bool]:
        return {
            "flat": self.flat,
            "downward_closed": self.downward_closed,
            "union_closed": self.union_closed,
            "empty_team": self.empty_team,
        }


def closure_flags(mask: np.ndarray, m: int) -> ClosureReport:
    """Closure properties of a family given as a boolean array over ``2**m``."""
    mask = np.asarray(mask, dtype=bool)
    teams = np.arange(1 << m, dtype=np.int64)
    singles = sum(1 << k for k in range(m) if mask[1 << k])
    flat = bool(np.array_equal(mask, (teams & ~np.int64(singles)) == 0))
    # removing one member at a time suffices for downward closure
    down = True
    for k in range(m):
        has = (teams >> k) & 1 == 1
        if (mask[has] & ~mask[teams[has] ^ (1 << k)]).any():
            down = False
            break
    # union closed iff every X that is the union of its member subteams is a member
    covered = _kernels.max_subteam(mask.astype(np.uint8), m) == teams
    covered[0] = False
    union = bool(not (covered & ~mask).any())
    return ClosureReport(flat=flat, downward_closed=down, union_closed=union,
                         empty_team=bool(mask[0]))


def check_closure_properties(phi: Formula, domain: TeamDomain) -> ClosureReport:
    fam = mod_set(phi, domain)
    return closure_flags(fam.mask, domain.num_valuations)
