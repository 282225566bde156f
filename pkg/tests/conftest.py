import pytest
from hypothesis import strategies as st

from levy_boundary import lattice, spectral, typedyn


@st.composite
def triangles(draw, max_level=8):
    """A random triangle of some level <= max_level, reached by subdividing level 0."""
    i = draw(st.integers(-3, 3))
    j = draw(st.integers(-3, 3))
    t = lattice.base_triangles(i, j)[draw(st.integers(0, 3))]
    for choice in draw(st.lists(st.integers(0, 1), max_size=max_level)):
        t = lattice.subdivide(t)[choice]
    return t


@pytest.fixture(scope="session")
def stable():
    return typedyn.stable_set()


@pytest.fixture(scope="session")
def matrix(stable):
    return spectral.build_matrix(stable)


@pytest.fixture(scope="session")
def blocks(matrix):
    return spectral.block_partition(matrix)


@pytest.fixture(scope="session")
def core(blocks):
    return blocks.C


# one line per acceptance criterion, filled by test_acceptance and echoed at the end
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
