import pytest
from hypothesis import strategies as st

from vcsat import SetFamily, builtin_family


def as_sets(fam):
    return {frozenset(m.elements()) for m in fam}


@st.composite
def families(draw, min_n=1, max_n=8, min_size=1, max_size=None):
    n = draw(st.integers(min_n, max_n))
    cap = 1 << n
    size_cap = min(cap, max_size) if max_size else cap
    masks = draw(st.sets(st.integers(0, cap - 1), min_size=min(min_size, cap), max_size=size_cap))
    return SetFamily(n, masks)


@st.composite
def subset_pairs(draw, n):
    # (x, y) masks with x ⊆ y ⊆ [n]
    y = draw(st.integers(0, (1 << n) - 1))
    x = draw(st.integers(0, (1 << n) - 1)) & y
    return x, y


@pytest.fixture(scope="session")
def d3_family():
    return builtin_family("d3")


@pytest.fixture(scope="session")
def d4_family():
    return builtin_family("d4")


@pytest.fixture(scope="session")
def d5_family():
    return builtin_family("d5")


@pytest.fixture(scope="session")
def even6():
    from vcsat import even_families, explicit_X_even, greedy_saturate

    base = even_families(6, explicit_X_even(6))
    return base, greedy_saturate(base)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
