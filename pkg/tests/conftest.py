from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from snctwist.sncmodel import curve_builder, curve_genus


@pytest.fixture
def fix_c1():
    """Genera (2, 1), one node, L of bidegree (3, 2)."""
    return curve_builder([2, 1], [(0, 1, 1)], {"L": [3, 2]})


@pytest.fixture
def fix_c2():
    """Genera (2, 2), one node, L of bidegree (1, 2)."""
    return curve_builder([2, 2], [(0, 1, 1)], {"L": [1, 2]})


def random_tree_curve(rng: random.Random, max_n: int = 6, max_genus: int = 5, max_nodes: int = 3, max_deg: int = 10):
    n = rng.randint(1, max_n)
    edges = [(rng.randrange(i), i, rng.randint(1, max_nodes)) for i in range(1, n)]
    genera = [rng.randint(0, max_genus) for _ in range(n)]
    degs = {"L": [rng.randint(-max_deg, max_deg) for _ in range(n)]}
    return curve_builder(genera, edges, degs)


def random_curves(seed: int, count: int, min_genus: int | None = None, **kw):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        c = random_tree_curve(rng, **kw)
        if min_genus is not None and curve_genus(c) < min_genus:
            continue
        out.append(c)
    return out


@st.composite
def tree_curves(draw, max_n: int = 5, max_genus: int = 4, max_nodes: int = 3, max_deg: int = 8):
    n = draw(st.integers(1, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    nodes = [draw(st.integers(1, max_nodes)) for _ in range(1, n)]
    genera = draw(st.lists(st.integers(0, max_genus), min_size=n, max_size=n))
    degs = draw(st.lists(st.integers(-max_deg, max_deg), min_size=n, max_size=n))
    edges = [(p, i + 1, k) for i, (p, k) in enumerate(zip(parents, nodes))]
    return curve_builder(genera, edges, {"L": degs})


def random_tree(rng: random.Random, n: int):
    return [(rng.randrange(i), i) for i in range(1, n)]


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
