import pytest

from euler_blowup.core import Background, GasParameters, WeightFunction
from euler_blowup.oracles import CaseIIGenerator


@pytest.fixture
def gas():
    return GasParameters(1, 3.0)


@pytest.fixture
def weight():
    return WeightFunction(1.0, 2.0)


@pytest.fixture
def cii1_background():
    return Background(1.0, 1.0, 0.25, 3.0)


@pytest.fixture
def cii1_generator(cii1_background):
    # pressure-driven converging bump: 0 < T1 <= T2 for the first Case II test
    return CaseIIGenerator(cii1_background, n=1, a_rho=0.05, a_v=-2.0, a_p=200.0)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
