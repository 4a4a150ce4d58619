import pytest

from doublepoisson import parse_tensor
from doublepoisson.brackets import DoubleBracketTable
from doublepoisson.structures import doubled, loop_quiver, pair_quiver


@pytest.fixture
def L():
    return loop_quiver()


@pytest.fixture
def dL():
    return doubled(loop_quiver())


@pytest.fixture
def dP2():
    return doubled(pair_quiver())


def lie_table(q):
    """{{t,t}} = t (x) 1 - 1 (x) t on the one-loop quiver."""
    return DoubleBracketTable(q, {("t", "t"): parse_tensor("t ⊗ e(1) - e(1) ⊗ t", q)})


def cubic_table(q):
    """{{t,t}} = t^2 (x) t - t (x) t^2."""
    return DoubleBracketTable(q, {("t", "t"): parse_tensor("t t ⊗ t - t ⊗ t t", q)})


@pytest.fixture
def T_lie(L):
    return lie_table(L)


@pytest.fixture
def T_cubic(L):
    return cubic_table(L)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
