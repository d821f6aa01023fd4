import pytest

from prefteam.preferential import build_builtin
from prefteam.teams import Team, TeamDomain


@pytest.fixture(scope="session")
def pq():
    return TeamDomain.of("p q")


@pytest.fixture(scope="session")
def pqr():
    return TeamDomain.of("p q r")


@pytest.fixture(scope="session")
def bpf():
    return TeamDomain.of("b p f")


@pytest.fixture(scope="session")
def split_team(pqr):
    return Team.from_valuations(pqr, ["100", "010"])


@pytest.fixture(scope="session")
def w_peng(bpf):
    return build_builtin("peng", bpf)


@pytest.fixture(scope="session")
def w_pq(pq):
    return build_builtin("pq", pq)


@pytest.fixture(scope="session")
def w_sub(pq):
    return build_builtin("sub", pq)


@pytest.fixture(scope="session")
def w_sup(pq):
    return build_builtin("sup", pq)
