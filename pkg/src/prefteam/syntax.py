"""Formula syntax for propositional team logics.

Formulas are immutable trees built from literals, ``top``/``bot``, binary
conjunction/disjunction, dependence atoms ``=(a b ; c)`` and inclusion atoms
``inc(a b ; c d)``.  Negation is only available on variables.

The concrete grammar::

    formula := disj
    disj    := conj ( "|" conj )*
    conj    := unit ( "&" unit )*
    unit    := "(" formula ")" | "top" | "bot" | ident | "~" ident
             | "=(" ident* ";" ident ")"
             | "inc(" ident+ ";" ident+ ")"
    ident   := [a-z][a-z0-9_]*

Both connectives are left-associative and ``&`` binds tighter than ``|``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

import numpy as np

from prefteam.errors import (
    ArityError,
    FormulaSyntaxError,
    FragmentError,
    UnknownVariableError,
)

if TYPE_CHECKING:
    from prefteam.teams import Team


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __and__(self, other: Formula) -> And:
        return And(self, other)

    def __or__(self, other: Formula) -> Or:
        return Or(self, other)

    def __str__(self) -> str:
        return to_text(self)


_node = dataclass(frozen=True, slots=True)


@_node
class PosLiteral(Formula):
    var: str


@_node
class NegLiteral(Formula):
    var: str


@_node
class Bottom(Formula):
    pass


@_node
class Top(Formula):
    pass


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Dep(Formula):
    """Dependence atom; an empty ``args`` tuple is a constancy atom."""

    args: tuple[str, ...]
    target: str

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@_node
class Inc(Formula):
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if not self.lhs or len(self.lhs) != len(self.rhs):
            raise ArityError(
                f"inclusion atom needs equal non-zero arities, got {len(self.lhs)} and {len(self.rhs)}"
            )


TOP = Top()
BOT = Bottom()


class Fragment(enum.Enum):
    PL = "PL"
    PDL = "PDL"
    PINCL = "PIncl"
    MIXED = "Mixed"

    @property
    def downward_closed(self) -> bool:
        return self in (Fragment.PL, Fragment.PDL)

    @property
    def union_closed(self) -> bool:
        return self in (Fragment.PL, Fragment.PINCL)

    @classmethod
    def parse(cls, name: str) -> Fragment:
        for frag in cls:
            if frag.value.lower() == name.lower():
                return frag
        raise ValueError(f"unknown fragment {name!r}")


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Post-order traversal (children before parents)."""
    if isinstance(phi, (And, Or)):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    yield phi


def variables(phi: Formula) -> frozenset[str]:
    out: set[str] = set()
    for node in subformulas(phi):
        if isinstance(node, (PosLiteral, NegLiteral)):
            out.add(node.var)
        elif isinstance(node, Dep):
            out.update(node.args)
            out.add(node.target)
        elif isinstance(node, Inc):
            out.update(node.lhs)
            out.update(node.rhs)
    return frozenset(out)


def depth(phi: Formula) -> int:
    if isinstance(phi, (And, Or)):
        return 1 + max(depth(phi.left), depth(phi.right))
    return 0


def classify(phi: Formula) -> Fragment:
    has_dep = has_inc = False
    for node in subformulas(phi):
        if isinstance(node, Dep):
            has_dep = True
        elif isinstance(node, Inc):
            has_inc = True
    if has_dep and has_inc:
        return Fragment.MIXED
    if has_dep:
        return Fragment.PDL
    if has_inc:
        return Fragment.PINCL
    return Fragment.PL


def flatten(phi: Formula) -> Formula:
    """Replace every dependence atom by ``top``."""
    if isinstance(phi, Dep):
        return TOP
    if isinstance(phi, Inc):
        raise FragmentError("flattening is only defined for formulas without inclusion atoms")
    if isinstance(phi, And):
        return And(flatten(phi.left), flatten(phi.right))
    if isinstance(phi, Or):
        return Or(flatten(phi.left), flatten(phi.right))
    return phi


def big_and(parts: Sequence[Formula], empty: Formula = TOP) -> Formula:
    if not parts:
        return empty
    out = parts[0]
    for part in parts[1:]:
        out = And(out, part)
    return out


def big_or(parts: Sequence[Formula], empty: Formula = BOT) -> Formula:
    if not parts:
        return empty
    out = parts[0]
    for part in parts[1:]:
        out = Or(out, part)
    return out


def valuation_formula(domain_vars: Sequence[str], index: int) -> Formula:
    """Full literal conjunction describing the valuation with the given index."""
    return big_and(
        [PosLiteral(v) if (index >> i) & 1 else NegLiteral(v) for i, v in enumerate(domain_vars)]
    )


def theta_formula(team: Team) -> Formula:
    """Formula whose team models are exactly the subteams of ``team``.

    The disjunction ranges over the members in ascending valuation index; the
    empty team gives ``bot``.
    """
    names = team.domain.variables
    return big_or([valuation_formula(names, v) for v in team.members()])


def constancy_conjunction(domain_vars: Sequence[str]) -> Formula:
    return big_and([Dep((), v) for v in domain_vars])


def cardinality_formula(team: Team, bound: int) -> Formula:
    """``theta_formula(team) & (c | c | ... | c)`` with ``bound`` copies of the
    all-constant conjunction ``c``.

    Its models are the subteams of ``team`` with at most ``bound`` members.
    """
    if bound < 1:
        raise ValueError(f"cardinality bound must be >= 1, got {bound}")
    c = constancy_conjunction(team.domain.variables)
    return And(theta_formula(team), big_or([c] * bound))


# ---------------------------------------------------------------------------
# Printing

def to_text(phi: Formula) -> str:
    if isinstance(phi, PosLiteral):
        return phi.var
    if isinstance(phi, NegLiteral):
        return "~" + phi.var
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, Bottom):
        return "bot"
    if isinstance(phi, Dep):
        args = " ".join(phi.args)
        return f"=({args} ; {phi.target})" if args else f"=(; {phi.target})"
    if isinstance(phi, Inc):
        return f"inc({' '.join(phi.lhs)} ; {' '.join(phi.rhs)})"
    if isinstance(phi, And):
        left = to_text(phi.left)
        if isinstance(phi.left, Or):
            left = f"({left})"
        right = to_text(phi.right)
        if isinstance(phi.right, (And, Or)):
            right = f"({right})"
        return f"{left} & {right}"
    if isinstance(phi, Or):
        right = to_text(phi.right)
        if isinstance(phi.right, Or):
            right = f"({right})"
        return f"{to_text(phi.left)} | {right}"
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<dep>=\()|(?P<inc>inc\()|(?P<ident>[a-z][a-z0-9_]*)|(?P<sym>[()&|~;]))"
)
_KEYWORDS = {"top", "bot"}


class _Parser:
    def __init__(self, text: str, domain: Iterable[str] | None):
        self.text = text
        self.domain = None if domain is None else frozenset(domain)
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise FormulaSyntaxError(f"unexpected character {text[bad]!r}", bad)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value or kind not in ("sym",):
            got = "end of input" if kind == "end" else repr(val)
            raise FormulaSyntaxError(f"expected {value!r}, got {got}", pos)

    def var(self, name: str, pos: int) -> str:
        if name in _KEYWORDS:
            raise FormulaSyntaxError(f"keyword {name!r} used as a variable", pos)
        if self.domain is not None and name not in self.domain:
            raise UnknownVariableError(f"unknown variable {name!r}", pos)
        return name

    def formula(self) -> Formula:
        out = self.conj()
        while self.peek()[1] == "|" and self.peek()[0] == "sym":
            self.take()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.unit()
        while self.peek()[1] == "&" and self.peek()[0] == "sym":
            self.take()
            out = And(out, self.unit())
        return out

    def idents(self) -> list[str]:
        names = []
        while self.peek()[0] == "ident":
            _, name, pos = self.take()
            names.append(self.var(name, pos))
        return names

    def unit(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "sym" and val == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if kind == "sym" and val == "~":
            k2, name, p2 = self.take()
            if k2 != "ident":
                raise FormulaSyntaxError("negation applies to variables only", p2)
            return NegLiteral(self.var(name, p2))
        if kind == "ident":
            if val == "top":
                return TOP
            if val == "bot":
                return BOT
            return PosLiteral(self.var(val, pos))
        if kind == "dep":
            args = self.idents()
            self.expect(";")
            k2, name, p2 = self.take()
            if k2 != "ident":
                raise FormulaSyntaxError("dependence atom needs exactly one target variable", p2)
            target = self.var(name, p2)
            self.expect(")")
            return Dep(tuple(args), target)
        if kind == "inc":
            lhs = self.idents()
            self.expect(";")
            rhs = self.idents()
            self.expect(")")
            if not lhs or len(lhs) != len(rhs):
                raise ArityError(
                    f"inclusion atom needs equal non-zero arities, got {len(lhs)} and {len(rhs)}",
                    pos,
                )
            return Inc(tuple(lhs), tuple(rhs))
        got = "end of input" if kind == "end" else repr(val)
        raise FormulaSyntaxError(f"unexpected {got}", pos)


def parse(text: str, domain: Iterable[str] | None = None) -> Formula:
    """Parse ``text``; if ``domain`` is given every variable must belong to it."""
    p = _Parser(text, domain)
    out = p.formula()
    kind, val, pos = p.peek()
    if kind != "end":
        raise FormulaSyntaxError(f"trailing input {val!r}", pos)
    return out


# ---------------------------------------------------------------------------
# Corpus generation

@dataclass(frozen=True)
class CorpusWeights:
    """Sampling weights for :func:`generate_corpus`."""

    binary: float = 0.4  # probability of a connective at each non-leaf step
    literal: float = 0.55
    constant: float = 0.15
    special: float = 0.30  # dependence / inclusion atoms, when the fragment allows them
    max_atom_arity: int = 2


def _random_atom(rng: np.random.Generator, names: Sequence[str], frag: Fragment,
                 w: CorpusWeights) -> Formula:
    kinds = ["literal", "constant"]
    weights = [w.literal, w.constant]
    special = []
    if frag in (Fragment.PDL, Fragment.MIXED):
        special.append("dep")
    if frag in (Fragment.PINCL, Fragment.MIXED):
        special.append("inc")
    for s in special:
        kinds.append(s)
        weights.append(w.special / len(special))
    p = np.asarray(weights, dtype=float)
    kind = kinds[rng.choice(len(kinds), p=p / p.sum())]
    n = len(names)
    if kind == "literal":
        v = names[rng.integers(n)]
        return PosLiteral(v) if rng.integers(2) else NegLiteral(v)
    if kind == "constant":
        return TOP if rng.integers(2) else BOT
    if kind == "dep":
        k = int(rng.integers(0, min(w.max_atom_arity, n) + 1))
        args = sorted(rng.choice(n, size=k, replace=False).tolist())
        return Dep(tuple(names[i] for i in args), names[rng.integers(n)])
    k = int(rng.integers(1, min(w.max_atom_arity, n) + 1))
    lhs = tuple(names[i] for i in rng.integers(n, size=k))
    rhs = tuple(names[i] for i in rng.integers(n, size=k))
    return Inc(lhs, rhs)


def _random_formula(rng, names, max_depth, frag, w) -> Formula:
    if max_depth == 0 or rng.random() >= w.binary:
        return _random_atom(rng, names, frag, w)
    left = _random_formula(rng, names, max_depth - 1, frag, w)
    right = _random_formula(rng, names, max_depth - 1, frag, w)
    return And(left, right) if rng.integers(2) else Or(left, right)


def generate_corpus(domain: str | Sequence[str], depth: int, atoms: Fragment | str = Fragment.PL,
                    seed: int = 0, count: int = 40,
                    weights: CorpusWeights | None = None) -> list[Formula]:
    """Seeded list of distinct random formulas of depth at most ``depth``.

    The list can be shorter than ``count`` when the space of formulas is
    exhausted (e.g. depth 0 over a small domain).
    """
    if depth < 0 or count < 1:
        raise ValueError("need depth >= 0 and count >= 1")
    frag = Fragment.parse(atoms) if isinstance(atoms, str) else atoms
    w = weights or CorpusWeights()
    names = domain.split() if isinstance(domain, str) else list(domain)
    rng = np.random.default_rng(seed)
    seen: dict[Formula, None] = {}
    attempts = 0
    while len(seen) < count and attempts < 200 * count:
        attempts += 1
        seen.setdefault(_random_formula(rng, names, depth, frag, w), None)
    return list(seen)
