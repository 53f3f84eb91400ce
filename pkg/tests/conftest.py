import numpy as np
import pytest

from polydec.mesh import build_mesh
from polydec.surfaces import gen_regular, make_surface

CRITERION_LINES: list = []


@pytest.fixture
def unit_square():
    return build_mesh([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2, 3]])


@pytest.fixture
def grid4():
    return gen_regular(make_surface("plane"), 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
