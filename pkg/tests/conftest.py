from fractions import Fraction

import pytest
from hypothesis import strategies as st

from eshinge import PointSet, gen_collinear, gen_grid, gen_random, gen_two_circles


@pytest.fixture
def right_triangle():
    return PointSet([(0, 0), (1, 0), (0, 1)])


@pytest.fixture
def grid2():
    return gen_grid(2)


def small_families(max_n=10):
    """Every generated family instance with n <= max_n, labelled."""
    out = []
    m = 1
    while m * m <= max_n:
        out.append((f"grid-{m}", gen_grid(m)))
        m += 1
    for n in range(1, max_n + 1):
        out.append((f"collinear-{n}", gen_collinear(n)))
        out.append((f"random-{n}", gen_random(n, 6, 1000 + n)))
    for n in range(4, max_n + 1):
        out.append((f"two-circles-{n}", gen_two_circles(n, 1, 2)))
    return out


coords = st.one_of(
    st.integers(-6, 6).map(Fraction),
    st.fractions(min_value=-4, max_value=4, max_denominator=4),
)


@st.composite
def point_sets(draw, min_size=1, max_size=7):
    pts = draw(st.lists(st.tuples(coords, coords), min_size=min_size, max_size=max_size, unique=True))
    return PointSet(pts)


ACCEPTANCE_LINES = {}


def record_criterion(number, passed, summary):
    line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {summary}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
