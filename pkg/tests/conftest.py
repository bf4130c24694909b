from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from riskorder.core import FunctionFamily, Poset, UtilityTable

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {name}"
    if detail:
        line += f" :: {detail}"
    print(line)
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def table(values, labels="abcdef") -> UtilityTable:
    return UtilityTable.from_values(labels[: len(values)], values)


@pytest.fixture
def e1():
    return table([0, 1, 4]), table([0, 1, 2])


@pytest.fixture
def e2():
    return table([0, 1]), table([1, 0])


@pytest.fixture
def e3():
    return table([0, 1, 2]), table([0, 1, 4])


def chain_family(members: dict) -> FunctionFamily:
    return FunctionFamily.from_values(Poset.chain(("a", "b")), members)


@pytest.fixture
def srm_ok_family():
    return chain_family({"phi": {"a": -1, "b": -1}, "psi": {"a": 1, "b": 2}})


@pytest.fixture
def srm_bad_family():
    return chain_family({"phi": {"a": -1, "b": -3}, "psi": {"a": 1, "b": 1}})


# ---------------------------------------------------------------------------
# hypothesis strategies
# ---------------------------------------------------------------------------

small_rationals = st.fractions(min_value=-10, max_value=10, max_denominator=4)
tiny_rationals = st.sampled_from([Fraction(k, d) for k in range(-3, 4) for d in (1, 2)])


@st.composite
def utility_pairs(draw, min_size=1, max_size=5, values=small_rationals):
    n = draw(st.integers(min_size, max_size))
    labels = "abcdef"[:n]
    u = UtilityTable.from_values(labels, draw(st.lists(values, min_size=n, max_size=n)))
    v = UtilityTable.from_values(labels, draw(st.lists(values, min_size=n, max_size=n)))
    return u, v


@st.composite
def posets(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    elements = tuple(f"t{i}" for i in range(n))
    order = draw(st.permutations(elements))
    rel = frozenset(
        (order[i], order[j])
        for i in range(n)
        for j in range(i + 1, n)
        if draw(st.booleans())
    )
    return Poset(elements, rel)


@st.composite
def families(draw, min_members=0, max_members=4, values=small_rationals):
    params = draw(posets())
    k = draw(st.integers(min_members, max_members))
    members = {
        f"f{i}": {t: draw(values) for t in params.elements}
        for i in range(k)
    }
    return FunctionFamily.from_values(params, members)
