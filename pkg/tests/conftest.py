import pytest

from qgh.fusion import build_group_dual, build_su2_like
from qgh.length import word_length

import _acceptance_log


@pytest.fixture(scope="session")
def zdual():
    A = build_group_dual(1, 400)
    return A, word_length(A, [A.index(1), A.index(-1)])


@pytest.fixture(scope="session")
def su2():
    A = build_su2_like("SU2", 140)
    return A, word_length(A, [A.index(1)])


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_log.LINES:
            terminalreporter.write_line(line)
