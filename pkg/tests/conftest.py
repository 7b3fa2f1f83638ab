import numpy as np
import pytest

from subspace_problem import geometry as geo
from subspace_problem import operators as ops
from subspace_problem.seq_space import default_matrix


@pytest.fixture(scope="session")
def families():
    return geo.AngularFamilies(12)


@pytest.fixture(scope="session")
def matrix():
    return default_matrix(12, 12)


@pytest.fixture(scope="session")
def tables(families):
    return ops.BoundaryTables(families, 8)


@pytest.fixture(scope="session")
def opmatrix(tables):
    return ops.build_operator_matrix(tables)


@pytest.fixture
def rng():
    return np.random.default_rng(20231)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
