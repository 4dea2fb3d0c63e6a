import numpy as np
import pytest

from sasred.action import TorusAction, sample_level_set


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ex41_action():
    return TorusAction(np.array([[-1, -1, 1, 1]]))


@pytest.fixture(scope="session")
def ex41_points(ex41_action):
    return sample_level_set(ex41_action, np.random.default_rng(5), 12)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance  # noqa: E402

    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
