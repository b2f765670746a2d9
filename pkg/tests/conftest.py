import math

import pytest

from streamsample import par_exec
from streamsample.rng import RandomEngine


def within_sigma(count: int, n: int, p: float, k: float = 3.0) -> bool:
    sd = math.sqrt(n * p * (1 - p))
    return abs(count - n * p) <= k * sd


@pytest.fixture
def engine():
    return RandomEngine(12345)


@pytest.fixture(autouse=True)
def _single_worker():
    with par_exec.workers(1):
        yield


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERIA, RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ac in CRITERIA:
        terminalreporter.write_line(RESULTS.get(ac, f"{ac} NOT RUN"))
