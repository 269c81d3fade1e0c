import pytest
from hypothesis import strategies as st

from cover_evolve.instance import Instance, generate_random, parse_orlib

MINIMAL_TEXT = "3 4\n2 3 1 4\n2 1 2\n1 3\n2 2 4\n"

_acceptance_lines: list[str] = []


@pytest.fixture
def minimal() -> Instance:
    """m=3, n=4, costs [2,3,1,4]; rows covered by {0,1}, {2}, {1,3}."""
    return parse_orlib(MINIMAL_TEXT)


@pytest.fixture
def dominant() -> Instance:
    """Column 0 covers every row and is the cheapest column everywhere."""
    rows = [(0, 1, 2), (0, 3), (0, 2, 4), (0, 1, 4), (0, 3)]
    return Instance((1, 5, 7, 9, 4), tuple(rows))


@st.composite
def instances(draw, max_rows: int = 10, max_cols: int = 14):
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    density = draw(st.sampled_from([0.1, 0.25, 0.4, 0.7, 1.0]))
    hi = draw(st.sampled_from([1, 5, 100]))
    seed = draw(st.integers(0, 2**31))
    return generate_random(m, n, density, (1, hi), seed)


@pytest.fixture
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
