import pytest
from hypothesis import given
from hypothesis import strategies as st

from _strategies import teams
from prefteam.errors import DomainError, DomainTooLargeError
from prefteam.teams import (
    Team,
    TeamDomain,
    TeamFamily,
    enumerate_nonempty_teams,
    enumerate_teams,
    format_team,
    parse_team,
    read_team,
    split_masks,
)

PQ = TeamDomain.of("p q")


def test_domain_encoding(pqr):
    assert pqr.n == 3 and pqr.num_valuations == 8 and pqr.num_teams == 256
    assert pqr.valuation_index({"p": 1, "q": 0, "r": 0}) == 1
    assert pqr.valuation_index([0, 1, 0]) == 2
    assert pqr.valuation(5) == {"p": 1, "q": 0, "r": 1}
    assert pqr.valuation_string(5) == "101"
    assert pqr.true_mask("p") == 0b10101010
    assert TeamDomain.of("p, q") == TeamDomain.of(["p", "q"])
    assert list(pqr) == ["p", "q", "r"]


def test_domain_errors():
    with pytest.raises(DomainError):
        TeamDomain.of("p p")
    with pytest.raises(DomainError):
        TeamDomain.of("")
    with pytest.raises(DomainTooLargeError):
        TeamDomain.of("a b c d e f g")
    with pytest.raises(DomainTooLargeError):
        TeamDomain.of("a b c d e").require_family_size()
    with pytest.raises(DomainTooLargeError):
        list(enumerate_teams(TeamDomain.of("a b c d e")))


def test_split_team_encoding(split_team):
    assert split_team.bits == 0b110
    assert split_team.members() == [1, 2]
    assert len(split_team) == 2
    assert split_team.valuation_strings() == ["100", "010"]


def test_from_valuations_collapses_duplicates():
    assert Team.from_valuations(PQ, ["10", "10", "01"]) == Team.from_indices(PQ, [1, 2])


def test_set_algebra():
    a = Team.from_indices(PQ, [0, 1])
    b = Team.from_indices(PQ, [1, 2])
    assert (a | b).members() == [0, 1, 2]
    assert (a & b).members() == [1]
    assert (a - b).members() == [0]
    assert (a & b) <= a and (a & b) < a and not a < a
    assert 1 in a and 3 not in a
    assert Team.empty(PQ).bits == 0 and Team.full(PQ).bits == 15
    with pytest.raises(DomainError):
        a | Team(TeamDomain.of("p r"), 1)


def test_bits_range():
    with pytest.raises(DomainError):
        Team(PQ, 16)


def test_enumeration_counts():
    assert len(list(enumerate_teams(PQ))) == 16
    assert len(list(enumerate_nonempty_teams(PQ))) == 15
    full = Team.full(PQ)
    assert len(list(full.subteams())) == 16
    assert len(list(full.proper_subsets())) == 15


@given(st.integers(0, 15))
def test_splits(bits):
    t = Team(PQ, bits)
    covers = list(t.splits("covers"))
    parts = list(t.splits("partitions"))
    assert len(covers) == 3 ** len(t)
    assert len(parts) == 2 ** len(t)
    assert all((y | z) == t for y, z in covers)
    assert all((y & z).bits == 0 for y, z in parts)
    assert set(parts) <= set(covers)
    with pytest.raises(ValueError):
        list(split_masks(bits, "halves"))


def test_family_roundtrip():
    fam = TeamFamily.from_teams(PQ, [0, 3, Team(PQ, 9)])
    assert fam.encodings() == [0, 3, 9]
    assert TeamFamily.from_int(PQ, fam.to_int()) == fam
    assert fam.to_int() == (1 << 0) | (1 << 3) | (1 << 9)
    assert 9 in fam and Team(PQ, 3) in fam and 4 not in fam
    assert len(fam) == 3
    assert fam <= TeamFamily.from_teams(PQ, range(16))
    with pytest.raises(ValueError):
        fam.mask[0] = False
    assert hash(fam) == hash(TeamFamily.from_teams(PQ, [9, 3, 0]))


@given(teams(TeamDomain.of("p q r")))
def test_team_text_roundtrip(t):
    assert parse_team(format_team(t), t.domain) == t


def test_team_file(tmp_path, pqr, split_team):
    path = tmp_path / "team.txt"
    path.write_text("# Example team\n100\n\n010  # second\n")
    assert read_team(path, pqr) == split_team
    with pytest.raises(DomainError):
        parse_team("10\n", pqr)
    with pytest.raises(DomainError):
        parse_team("1x0\n", pqr)
    assert parse_team("", pqr) == Team.empty(pqr)
