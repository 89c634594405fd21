import itertools

import pytest
from hypothesis import strategies as st

from plasmic import plasma as pl


@st.composite
def plasmas(draw, max_size: int = 4):
    """Random weakly unital commutative tables."""
    k = draw(st.integers(1, max_size))
    table = {}
    for i in range(k):
        for j in range(i + 1):
            table[(i, j)] = draw(st.integers(0, (1 << k) - 1))
    for a in range(k):
        table[(a, 0)] |= 1 << a
    return pl.Plasma([str(i) for i in range(k)], table, name="random")


@st.composite
def strict_plasmas(draw, max_size: int = 4):
    p = draw(plasmas(max_size))
    k = len(p)
    table = {(i, j): p.sum(i, j) for i in range(k) for j in range(i + 1)}
    for a in range(k):
        table[(a, 0)] = 1 << a
    return pl.Plasma(p.labels, table, name="random strict")


def brute_force_morphisms(p, q):
    """Every unit-preserving function, filtered by the definition."""
    out = []
    for rest in itertools.product(range(len(q)), repeat=len(p) - 1):
        f = (0,) + rest
        if pl.is_morphism(p, q, f):
            out.append(f)
    return out


@pytest.fixture
def K():
    return pl.krasner()


@pytest.fixture
def F1():
    return pl.psi_f1()


# criterion number -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else ""))
