"""Valuations, teams and families of teams over a finite variable domain.

Encodings are fixed so that reports and files stay stable:

* valuation ``k``: bit ``i`` of ``k`` is the value of the ``i``-th domain variable;
* team: the integer whose bit ``k`` says whether valuation ``k`` is a member;
* family of teams: a bitset indexed by team encoding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from prefteam.errors import DomainError, DomainTooLargeError

N_MAX = 4  # full team-lattice enumeration: 2**16 teams
N_MAX_SINGLE = 6  # single satisfaction queries: teams fit in 64 bits


@dataclass(frozen=True)
class TeamDomain:
    variables: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise DomainError("domain must contain at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise DomainError(f"duplicate variable in domain {self.variables}")
        if len(self.variables) > N_MAX_SINGLE:
            raise DomainTooLargeError(
                f"domain has {len(self.variables)} variables; at most {N_MAX_SINGLE} supported"
            )

    @classmethod
    def of(cls, spec: str | Iterable[str]) -> TeamDomain:
        """Build from ``"p q r"`` or an iterable of names."""
        if isinstance(spec, TeamDomain):
            return spec
        if isinstance(spec, str):
            spec = spec.replace(",", " ").split()
        return cls(tuple(spec))

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def num_valuations(self) -> int:
        return 1 << self.n

    @property
    def num_teams(self) -> int:
        return 1 << (1 << self.n)

    @property
    def full_bits(self) -> int:
        return (1 << self.num_valuations) - 1

    def __iter__(self):
        return iter(self.variables)

    def __len__(self) -> int:
        return len(self.variables)

    def index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise DomainError(f"variable {var!r} not in domain {self.variables}") from None

    def true_mask(self, var: str) -> int:
        """Team bits of all valuations making ``var`` true."""
        i = self.index(var)
        return sum(1 << k for k in range(self.num_valuations) if (k >> i) & 1)

    def valuation(self, k: int) -> dict[str, int]:
        return {v: (k >> i) & 1 for i, v in enumerate(self.variables)}

    def valuation_index(self, values: Mapping[str, int] | Sequence[int]) -> int:
        if isinstance(values, Mapping):
            values = [values[v] for v in self.variables]
        if len(values) != self.n:
            raise DomainError(f"valuation has {len(values)} values, domain has {self.n}")
        return sum((1 << i) for i, b in enumerate(values) if int(b))

    def valuation_string(self, k: int) -> str:
        return "".join(str((k >> i) & 1) for i in range(self.n))

    def require_family_size(self) -> None:
        if self.n > N_MAX:
            raise DomainTooLargeError(
                f"team-lattice enumeration needs at most {N_MAX} variables, domain has {self.n}"
            )

    def __str__(self) -> str:
        return " ".join(self.variables)


def _bits_members(bits: int) -> list[int]:
    out = []
    k = 0
    while bits:
        if bits & 1:
            out.append(k)
        bits >>= 1
        k += 1
    return out


@dataclass(frozen=True, order=False)
class Team:
    domain: TeamDomain
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits > self.domain.full_bits:
            raise DomainError(f"team encoding {self.bits} out of range for domain {self.domain}")

    # construction ---------------------------------------------------------
    @classmethod
    def empty(cls, domain: TeamDomain) -> Team:
        return cls(domain, 0)

    @classmethod
    def full(cls, domain: TeamDomain) -> Team:
        return cls(domain, domain.full_bits)

    @classmethod
    def from_valuations(cls, domain: TeamDomain,
                        valuations: Iterable[Mapping[str, int] | Sequence[int] | str]) -> Team:
        """Duplicated valuations collapse, teams being sets."""
        bits = 0
        for v in valuations:
            if isinstance(v, str):
                v = [int(c) for c in v]
            bits |= 1 << domain.valuation_index(v)
        return cls(domain, bits)

    @classmethod
    def from_indices(cls, domain: TeamDomain, indices: Iterable[int]) -> Team:
        bits = 0
        for k in indices:
            bits |= 1 << k
        return cls(domain, bits)

    # queries ----------------------------------------------------------------
    def members(self) -> list[int]:
        """Member valuation indices in ascending order."""
        return _bits_members(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    cardinality = __len__

    def __contains__(self, k: int) -> bool:
        return bool((self.bits >> k) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members())

    def _check(self, other: Team) -> None:
        if self.domain != other.domain:
            raise DomainError(f"domain mismatch: {self.domain} vs {other.domain}")

    def union(self, other: Team) -> Team:
        self._check(other)
        return Team(self.domain, self.bits | other.bits)

    def intersection(self, other: Team) -> Team:
        self._check(other)
        return Team(self.domain, self.bits & other.bits)

    def difference(self, other: Team) -> Team:
        self._check(other)
        return Team(self.domain, self.bits & ~other.bits)

    def is_subset(self, other: Team) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def is_proper_subset(self, other: Team) -> bool:
        return self.is_subset(other) and self.bits != other.bits

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __le__ = is_subset
    __lt__ = is_proper_subset

    def subteams(self) -> Iterator[Team]:
        """All ``2**len(self)`` subteams, the empty team first."""
        for sub in iter_submasks(self.bits):
            yield Team(self.domain, sub)

    def proper_subsets(self) -> Iterator[Team]:
        for sub in iter_submasks(self.bits):
            if sub != self.bits:
                yield Team(self.domain, sub)

    def splits(self, mode: str = "covers") -> Iterator[tuple[Team, Team]]:
        """Pairs ``(Y, Z)`` with ``Y | Z == self``; disjoint pairs only for
        ``mode="partitions"``."""
        for y, z in split_masks(self.bits, mode):
            yield Team(self.domain, y), Team(self.domain, z)

    def valuation_strings(self) -> list[str]:
        return [self.domain.valuation_string(k) for k in self.members()]

    def __repr__(self) -> str:
        return f"Team({{{', '.join(self.valuation_strings())}}})"


def iter_submasks(bits: int) -> Iterator[int]:
    """All submasks of ``bits`` in ascending order."""
    members = _bits_members(bits)
    for r in range(1 << len(members)):
        sub = 0
        for i, k in enumerate(members):
            if (r >> i) & 1:
                sub |= 1 << k
        yield sub


def split_masks(bits: int, mode: str = "covers") -> Iterator[tuple[int, int]]:
    if mode not in ("covers", "partitions"):
        raise ValueError(f"unknown split mode {mode!r}")
    members = _bits_members(bits)
    # each member goes left, right or (covers only) both
    choices = (0, 1, 2) if mode == "covers" else (0, 1)
    for assignment in itertools.product(choices, repeat=len(members)):
        y = z = 0
        for k, c in zip(members, assignment):
            if c != 1:
                y |= 1 << k
            if c != 0:
                z |= 1 << k
        yield y, z


def enumerate_nonempty_teams(domain: TeamDomain) -> Iterator[Team]:
    """Every non-empty team, in ascending encoding order."""
    domain.require_family_size()
    for bits in range(1, domain.num_teams):
        yield Team(domain, bits)


def enumerate_teams(domain: TeamDomain) -> Iterator[Team]:
    domain.require_family_size()
    for bits in range(domain.num_teams):
        yield Team(domain, bits)


class TeamFamily:
    """A set of teams over one domain, stored as a boolean array indexed by
    team encoding."""

    __slots__ = ("domain", "_mask")

    def __init__(self, domain: TeamDomain, mask: np.ndarray):
        domain.require_family_size()
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (domain.num_teams,):
            raise DomainError(f"family mask must have {domain.num_teams} entries, got {mask.shape}")
        mask = mask.copy()
        mask.flags.writeable = False
        self.domain = domain
        self._mask = mask

    @classmethod
    def from_teams(cls, domain: TeamDomain, teams: Iterable[Team | int]) -> TeamFamily:
        mask = np.zeros(domain.num_teams, dtype=bool)
        for t in teams:
            mask[t.bits if isinstance(t, Team) else t] = True
        return cls(domain, mask)

    @classmethod
    def from_int(cls, domain: TeamDomain, value: int) -> TeamFamily:
        return cls(domain, [(value >> i) & 1 for i in range(domain.num_teams)])

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    def to_int(self) -> int:
        packed = np.packbits(self._mask, bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")

    def encodings(self) -> list[int]:
        return np.flatnonzero(self._mask).tolist()

    def teams(self) -> list[Team]:
        return [Team(self.domain, b) for b in self.encodings()]

    def __contains__(self, team: Team | int) -> bool:
        bits = team.bits if isinstance(team, Team) else team
        return bool(self._mask[bits])

    def __len__(self) -> int:
        return int(self._mask.sum())

    def __iter__(self) -> Iterator[Team]:
        return iter(self.teams())

    def issubset(self, other: TeamFamily) -> bool:
        return bool(not (self._mask & ~other._mask).any())

    def __le__(self, other: TeamFamily) -> bool:
        return self.issubset(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TeamFamily):
            return NotImplemented
        return self.domain == other.domain and bool(np.array_equal(self._mask, other._mask))

    def __hash__(self) -> int:
        return hash((self.domain, self._mask.tobytes()))

    def __repr__(self) -> str:
        return f"TeamFamily({self.encodings()})"


# ---------------------------------------------------------------------------
# Team text format: one 0/1 string per valuation, in domain variable order.

def parse_team(text: str, domain: TeamDomain) -> Team:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if len(line) != domain.n or set(line) - {"0", "1"}:
            raise DomainError(
                f"line {lineno}: expected a {domain.n}-character 0/1 string, got {line!r}"
            )
        rows.append(line)
    return Team.from_valuations(domain, rows)


def format_team(team: Team) -> str:
    rows = team.valuation_strings()
    return "\n".join(rows) + ("\n" if rows else "")


def read_team(path, domain: TeamDomain) -> Team:
    with open(path, encoding="utf-8") as fh:
        return parse_team(fh.read(), domain)
