import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from maprenewal.markov_model import gallery

settings.register_profile(
    "repo", max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def iid():
    return gallery("iid")


@pytest.fixture(scope="session")
def two_state():
    return gallery("two_state")


@pytest.fixture(scope="session")
def doeblin():
    return gallery("doeblin_k_state")


@pytest.fixture(scope="session")
def lattice():
    return gallery("lattice_negative_control")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
