import numpy as np
import pytest

from stmod.groups import group


@pytest.fixture(scope="session")
def groups():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = group(name)
        return cache[name]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for res in RESULTS.values():
            terminalreporter.write_line(res.line())
