import numpy as np
import pytest

from entbound.paper import experiment_problem, reproduce

# filled by test_acceptance; printed after the run
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def w1_record():
    return experiment_problem("geometric", ["W1"]).records[0]


@pytest.fixture(scope="session")
def w2_record():
    return experiment_problem("geometric", ["W2"]).records[0]


@pytest.fixture(scope="session")
def paper_report():
    # every experiment bound, computed once per session
    return reproduce()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def pytest_collection_modifyitems(items):
    # the full experiment reproduction takes minutes
    for item in items:
        if "paper_report" in getattr(item, "fixturenames", ()):
            item.add_marker(pytest.mark.slow)
