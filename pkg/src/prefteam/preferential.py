"""Preferential models over teams and the non-monotonic entailment they induce.

A model is a finite list of states, each labelled by a team, together with a
strict partial order on the states.  ``phi |~ psi`` holds when every
order-minimal state whose label satisfies ``phi`` has a label satisfying
``psi``.

State sets are handled as Python int bitmasks over state positions.  Orders
come in two flavours: explicit (a transitively closed "strictly below" mask
per state) or a rule on labels (``subset``, ``superset``, ``discrete``), the
latter avoiding quadratic storage for the 2**16 - 1 states of a four-variable
standard model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from prefteam import _kernels
from prefteam.errors import DomainError, DomainTooLargeError, ModelError
from prefteam.semantics import classical_truth, mod_set
from prefteam.syntax import Formula
from prefteam.teams import Team, TeamDomain

RULE_ORDERS = ("subset", "superset", "discrete")
BUILTINS = ("sub", "sup", "peng", "pq", "discrete")
WITNESS_CAP = 16


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        low = mask & -mask
        i = low.bit_length() - 1
        out.append(i)
        mask ^= low
    return out


def _mask_from_bool(arr: np.ndarray) -> int:
    packed = np.packbits(np.asarray(arr, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _bool_from_mask(mask: int, size: int) -> np.ndarray:
    raw = mask.to_bytes((size + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size].astype(bool)


def transitive_closure(below: Sequence[int]) -> list[int]:
    """Close "strictly below" bitmasks under transitivity (bitset Warshall)."""
    below = list(below)
    for k in range(len(below)):
        bit = 1 << k
        bk = below[k]
        if not bk:
            continue
        for j in range(len(below)):
            if below[j] & bit:
                below[j] |= bk
    return below


@dataclass(frozen=True)
class MinSet:
    states: tuple[Hashable, ...]
    teams: tuple[Team, ...]

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class NMResult:
    """Verdict of ``phi |~ psi`` with the minimal states refuting ``psi``."""

    holds: bool
    witnesses: tuple[Hashable, ...] = ()
    witness_teams: tuple[Team, ...] = ()

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class StandardnessReport:
    s1_ok: bool
    s2_ok: bool
    empty_states: tuple[Hashable, ...] = ()
    missing_teams: tuple[Team, ...] = ()

    @property
    def standard(self) -> bool:
        return self.s1_ok and self.s2_ok


@dataclass(eq=False)
class PreferentialModel:
    """``states[i]`` is labelled by the team with encoding ``labels[i]``.

    For ``order_kind == "explicit"``, ``below[i]`` is the bitmask of states
    strictly preferred to state ``i`` (transitively closed).
    """

    domain: TeamDomain
    states: tuple[Hashable, ...]
    labels: tuple[int, ...]
    order_kind: str = "explicit"
    below: tuple[int, ...] | None = None
    name: str | None = None
    _min_cache: dict = field(default_factory=dict, repr=False)
    _label_arr: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.states = tuple(self.states)
        self.labels = tuple(int(b) for b in self.labels)
        if len(self.states) != len(self.labels):
            raise ModelError("one label per state required")
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state ids")
        full = self.domain.full_bits
        for s, b in zip(self.states, self.labels):
            if b < 0 or b > full:
                raise ModelError(f"label {b} of state {s!r} is not a team over {self.domain}")
        if self.order_kind == "explicit":
            if self.below is None or len(self.below) != len(self.states):
                raise ModelError("explicit orders need a below-mask per state")
            self.below = tuple(self.below)
        elif self.order_kind in RULE_ORDERS:
            self.below = None
        else:
            raise ModelError(f"unknown order kind {self.order_kind!r}")
        self._index = {s: i for i, s in enumerate(self.states)}
        self._label_arr = np.asarray(self.labels, dtype=np.int64)

    # construction ---------------------------------------------------------
    @classmethod
    def from_edges(cls, domain: TeamDomain, states: Iterable[tuple[Hashable, int]],
                   edges: Iterable[tuple[Hashable, Hashable]], name: str | None = None
                   ) -> PreferentialModel:
        """Model from labelled states and a generating relation ``a < b``.

        The relation is closed transitively; a cycle raises :class:`ModelError`.
        """
        states = list(states)
        ids = [s for s, _ in states]
        index = {s: i for i, s in enumerate(ids)}
        if len(index) != len(ids):
            raise ModelError("duplicate state ids")
        below = [0] * len(ids)
        for a, b in edges:
            try:
                below[index[b]] |= 1 << index[a]
            except KeyError as exc:
                raise ModelError(f"order mentions unknown state {exc.args[0]!r}") from None
        below = transitive_closure(below)
        for i, mask in enumerate(below):
            if (mask >> i) & 1:
                raise ModelError(f"order is not irreflexive after closure: state {ids[i]!r} precedes itself")
        return cls(domain, tuple(ids), tuple(b for _, b in states), "explicit", tuple(below), name)

    @classmethod
    def standard_rule(cls, domain: TeamDomain, kind: str, name: str | None = None) -> PreferentialModel:
        """One state per non-empty team (state id = team encoding), ordered by a rule."""
        domain.require_family_size()
        teams = tuple(range(1, domain.num_teams))
        return cls(domain, teams, teams, kind, None, name)

    # basic queries --------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, state: Hashable) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise ModelError(f"no state {state!r}") from None

    def label(self, state: Hashable) -> Team:
        return Team(self.domain, self.labels[self.index(state)])

    def precedes(self, a: Hashable, b: Hashable) -> bool:
        """``a`` strictly preferred to ``b``."""
        return self._precedes(self.index(a), self.index(b))

    def _precedes(self, i: int, j: int) -> bool:
        if self.order_kind == "explicit":
            return bool((self.below[j] >> i) & 1)
        li, lj = self.labels[i], self.labels[j]
        if self.order_kind == "subset":
            return li != lj and li & ~lj == 0
        if self.order_kind == "superset":
            return li != lj and lj & ~li == 0
        return False

    def below_mask(self, j: int) -> int:
        if self.order_kind == "explicit":
            return self.below[j]
        return sum(1 << i for i in range(self.size) if self._precedes(i, j))

    def check_order(self) -> bool:
        """Irreflexivity and transitivity of the stored order."""
        if self.order_kind != "explicit":
            return True
        for j, mask in enumerate(self.below):
            if (mask >> j) & 1:
                return False
            for i in _bits(mask):
                if self.below[i] & ~mask:
                    return False
        return True

    def _check_domain(self, phi: Formula) -> None:
        from prefteam.syntax import variables

        missing = variables(phi) - set(self.domain.variables)
        if missing:
            raise DomainError(f"variables {sorted(missing)} not in model domain {self.domain}")

    # state sets -------------------------------------------------------------
    def sat_mask(self, phi: Formula) -> int:
        """Bitmask of the states whose label satisfies ``phi``."""
        self._check_domain(phi)
        fam = mod_set(phi, self.domain).mask
        return _mask_from_bool(fam[self._label_arr])

    def min_mask(self, smask: int) -> int:
        """Bitmask of the order-minimal states among ``smask``."""
        hit = self._min_cache.get(smask)
        if hit is not None:
            return hit
        kind = self.order_kind
        if kind == "discrete" or smask == 0:
            out = smask
        elif kind == "explicit":
            out = 0
            for i in _bits(smask):
                if not self.below[i] & smask:
                    out |= 1 << i
        else:
            sel = _bool_from_mask(smask, self.size)
            m = self.domain.num_valuations
            fam = np.zeros(self.domain.num_teams, dtype=np.uint8)
            fam[self._label_arr[sel]] = 1
            if kind == "subset":
                beaten = _kernels.strict_down_exists(fam, m)
            else:
                beaten = _kernels.strict_up_exists(fam, m)
            out = _mask_from_bool(sel & ~beaten[self._label_arr].astype(bool))
        if len(self._min_cache) < 1 << 16:
            self._min_cache[smask] = out
        return out

    def _ids(self, mask: int) -> tuple[Hashable, ...]:
        return tuple(self.states[i] for i in _bits(mask))

    def _teams(self, mask: int) -> tuple[Team, ...]:
        return tuple(Team(self.domain, self.labels[i]) for i in _bits(mask))

    def states_of(self, phi: Formula) -> tuple[Hashable, ...]:
        return self._ids(self.sat_mask(phi))

    def min_states(self, phi: Formula) -> MinSet:
        mm = self.min_mask(self.sat_mask(phi))
        return MinSet(self._ids(mm), self._teams(mm))

    def entails(self, phi: Formula, psi: Formula, cap: int = WITNESS_CAP) -> NMResult:
        """``phi |~ psi``; on failure lists up to ``cap`` minimal counter-states."""
        mm = self.min_mask(self.sat_mask(phi))
        bad = mm & ~self.sat_mask(psi)
        if not bad:
            return NMResult(True)
        idx = _bits(bad)[:cap]
        return NMResult(False, tuple(self.states[i] for i in idx),
                        tuple(Team(self.domain, self.labels[i]) for i in idx))

    def __repr__(self) -> str:
        tag = self.name or self.order_kind
        return f"PreferentialModel({tag}, domain={self.domain}, states={self.size})"


def states_of(model: PreferentialModel, phi: Formula) -> tuple[Hashable, ...]:
    return model.states_of(phi)


def min_states(model: PreferentialModel, phi: Formula) -> MinSet:
    return model.min_states(phi)


def entails_nm(model: PreferentialModel, phi: Formula, psi: Formula,
               cap: int = WITNESS_CAP) -> NMResult:
    return model.entails(phi, psi, cap)


def check_smoothness(model: PreferentialModel, corpus: Iterable[Formula]) -> bool:
    """Every satisfying state is minimal or lies above a minimal satisfying state."""
    for phi in corpus:
        smask = model.sat_mask(phi)
        mm = model.min_mask(smask)
        rest = smask & ~mm
        if not rest:
            continue
        if model.order_kind == "explicit":
            if any(not model.below[i] & mm for i in _bits(rest)):
                return False
        else:
            mins = _bits(mm)
            for i in _bits(rest):
                if not any(model._precedes(j, i) for j in mins):
                    return False
    return True


def check_standard(model: PreferentialModel) -> StandardnessReport:
    model.domain.require_family_size()
    empty = tuple(s for s, b in zip(model.states, model.labels) if b == 0)
    present = set(model.labels)
    missing = tuple(Team(model.domain, b) for b in range(1, model.domain.num_teams)
                    if b not in present)
    return StandardnessReport(not empty, not missing, empty, missing)


# ---------------------------------------------------------------------------
# Built-in models

def _require_vars(domain: TeamDomain, names: str, model: str) -> None:
    if set(domain.variables) != set(names) or domain.n != len(names):
        raise DomainError(f"builtin {model!r} needs domain over {{{', '.join(names)}}}, got {domain}")


def _standard_explicit(domain: TeamDomain, edges, name: str) -> PreferentialModel:
    teams = range(1, domain.num_teams)
    return PreferentialModel.from_edges(domain, [(t, t) for t in teams], edges, name)


def penguin_model(domain: TeamDomain) -> PreferentialModel:
    """Birds usually fly, penguins usually do not.

    Generating relation: the flying non-penguin bird is below the non-flying
    penguin bird, both are below every other singleton, and every non-empty
    proper subteam is below its non-singleton superteams.  Closed transitively.
    """
    _require_vars(domain, "bpf", "peng")
    bird = 1 << domain.valuation_index({"b": 1, "p": 0, "f": 1})
    penguin = 1 << domain.valuation_index({"b": 1, "p": 1, "f": 0})
    edges = [(bird, penguin)]
    for k in range(domain.num_valuations):
        x = 1 << k
        if x not in (bird, penguin):
            edges += [(penguin, x), (bird, x)]
    edges += _proper_subteam_edges(domain)
    return _standard_explicit(domain, edges, "peng")


def _proper_subteam_edges(domain: TeamDomain):
    for z in range(1, domain.num_teams):
        if z.bit_count() < 2:
            continue
        y = (z - 1) & z
        while y:
            yield (y, z)
            y = (y - 1) & z


def pq_model(domain: TeamDomain) -> PreferentialModel:
    """Model violating (Or): ``p |~ q`` and ``~p |~ q`` but not ``p | ~p |~ q``."""
    _require_vars(domain, "pq", "pq")
    v1 = domain.valuation_index({"p": 1, "q": 1})
    v2 = domain.valuation_index({"p": 0, "q": 1})
    v3 = domain.valuation_index({"p": 0, "q": 0})
    x_pq, x_npq, x_iff = 1 << v1, 1 << v2, (1 << v1) | (1 << v3)
    edges = [(x_iff, x_pq), (x_iff, x_npq)]
    for x in range(1, domain.num_teams):
        if x not in (x_pq, x_npq, x_iff):
            edges += [(x_pq, x), (x_npq, x)]
    return _standard_explicit(domain, edges, "pq")


def build_builtin(name: str, domain: TeamDomain) -> PreferentialModel:
    if name == "sub":
        return PreferentialModel.standard_rule(domain, "subset", "sub")
    if name == "sup":
        return PreferentialModel.standard_rule(domain, "superset", "sup")
    if name == "discrete":
        return PreferentialModel.standard_rule(domain, "discrete", "discrete")
    if name == "peng":
        return penguin_model(domain)
    if name == "pq":
        return pq_model(domain)
    raise ModelError(f"unknown builtin model {name!r}; choose from {', '.join(BUILTINS)}")


def random_standard_model(domain: TeamDomain, seed: int, edge_prob: float = 0.3,
                          ordering: str = "random") -> PreferentialModel:
    """Standard model (one state per non-empty team) with a random order.

    States are laid out along a random linear order (``"random"``) or sorted
    by team size with random tie-breaking (``"cardinality"``); each forward
    pair becomes an edge with probability ``edge_prob``; the result is closed
    transitively.
    """
    domain.require_family_size()
    if domain.num_teams > 1 << 8:
        raise DomainTooLargeError("random standard models are limited to domains of at most 3 variables")
    rng = np.random.default_rng(seed)
    teams = np.arange(1, domain.num_teams)
    perm = rng.permutation(teams)
    if ordering == "cardinality":
        sizes = np.array([int(t).bit_count() for t in perm])
        perm = perm[np.argsort(sizes, kind="stable")]
    elif ordering != "random":
        raise ValueError(f"unknown ordering {ordering!r}")
    perm = perm.tolist()
    coins = rng.random((len(perm), len(perm)))
    edges = [(perm[i], perm[j]) for i in range(len(perm)) for j in range(i + 1, len(perm))
             if coins[i, j] < edge_prob]
    model = _standard_explicit(domain, edges, f"random:{seed}")
    if not model.check_order():
        raise ModelError("generated order is not a strict partial order")
    return model


# ---------------------------------------------------------------------------
# Model files

_ID = r"[A-Za-z0-9_]+"


def parse_model(text: str, domain: TeamDomain | None = None) -> PreferentialModel:
    """Read the model file format::

        domain: p q
        builtin: sub

    or::

        domain: p q
        states:
          a = 1
          b = 3
        order:
          a < b
    """
    file_domain = None
    states: list[tuple[str, int]] = []
    edges: list[tuple[str, str]] = []
    section = None
    builtin = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        key = head.strip().lower()
        if sep and key in ("domain", "builtin", "states", "order"):
            if key == "domain":
                file_domain = TeamDomain.of(rest)
            elif key == "builtin":
                builtin = rest.strip()
            else:
                section = key
                if rest.strip():
                    raise ModelError(f"line {lineno}: unexpected text after {key}:")
            continue
        if section == "states":
            m = re.fullmatch(rf"({_ID})\s*=\s*(\d+)", line)
            if not m:
                raise ModelError(f"line {lineno}: expected 'id = team-encoding', got {line!r}")
            states.append((m.group(1), int(m.group(2))))
        elif section == "order":
            m = re.fullmatch(rf"({_ID})\s*<\s*({_ID})", line)
            if not m:
                raise ModelError(f"line {lineno}: expected 'id < id', got {line!r}")
            edges.append((m.group(1), m.group(2)))
        else:
            raise ModelError(f"line {lineno}: unexpected line {line!r}")
    if file_domain is None:
        raise ModelError("model file lacks a 'domain:' line")
    if domain is not None and domain != file_domain:
        raise DomainError(f"model domain {file_domain} differs from requested domain {domain}")
    if builtin is not None:
        if states or edges:
            raise ModelError("a builtin model file cannot also list states or order")
        return build_builtin(builtin, file_domain)
    if not states:
        raise ModelError("model file lists no states")
    return PreferentialModel.from_edges(file_domain, states, edges)


def format_model(model: PreferentialModel) -> str:
    lines = [f"domain: {model.domain}"]
    if model.name in ("sub", "sup", "discrete", "peng", "pq"):
        lines.append(f"builtin: {model.name}")
        return "\n".join(lines) + "\n"
    lines.append("states:")
    lines += [f"  {s} = {b}" for s, b in zip(model.states, model.labels)]
    lines.append("order:")
    for j, s in enumerate(model.states):
        for i in _bits(model.below_mask(j)):
            lines.append(f"  {model.states[i]} < {s}")
    return "\n".join(lines) + "\n"


def load_model(spec: str, domain: TeamDomain) -> PreferentialModel:
    """``builtin:<name>``, ``random:<seed>`` or a path to a model file."""
    if spec.startswith("builtin:"):
        return build_builtin(spec.split(":", 1)[1], domain)
    if spec.startswith("random:"):
        return random_standard_model(domain, int(spec.split(":", 1)[1]))
    with open(spec, encoding="utf-8") as fh:
        return parse_model(fh.read(), domain)


# ---------------------------------------------------------------------------
# Classical preferential models (states labelled by single valuations)

@dataclass(frozen=True)
class ClassicalModel:
    domain: TeamDomain
    states: tuple[Hashable, ...]
    valuations: tuple[int, ...]
    below: tuple[int, ...]

    def entails(self, alpha: Formula, beta: Formula) -> bool:
        sat = sum(1 << i for i, v in enumerate(self.valuations)
                  if classical_truth(alpha, self.domain, v))
        for i in _bits(sat):
            if not self.below[i] & sat and not classical_truth(beta, self.domain, self.valuations[i]):
                return False
        return True


def singleton_projection(model: PreferentialModel) -> ClassicalModel:
    """The classical model on the singleton-labelled states, ordered as in ``model``."""
    keep = [i for i, b in enumerate(model.labels) if b.bit_count() == 1]
    pos = {i: r for r, i in enumerate(keep)}
    below = [sum(1 << pos[i] for i in keep if model._precedes(i, j)) for j in keep]
    return ClassicalModel(
        model.domain,
        tuple(model.states[i] for i in keep),
        tuple(model.labels[i].bit_length() - 1 for i in keep),
        tuple(below),
    )
