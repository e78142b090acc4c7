import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from oblivious_dicut.graph import WeightedDigraph
from oblivious_dicut.selection import antisymmetric_from_lower

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

HALF = Fraction(1, 2)

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, 12):
        if k in ACCEPTANCE:
            ok, detail = ACCEPTANCE[k]
            terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {k:2d}: NOT RUN")


# --- random objects --------------------------------------------------------


def random_graph(rng: random.Random, max_vertices=6, max_edges=10, max_weight=9, denominators=(1,)):
    n = rng.randint(2, max_vertices)
    edges = []
    for _ in range(rng.randint(1, max_edges)):
        u, v = rng.sample(range(n), 2)
        edges.append((u, v, Fraction(rng.randint(1, max_weight), rng.choice(denominators))))
    return WeightedDigraph(n, tuple(edges))


def random_antisymmetric(rng: random.Random, max_breaks=3, denom=20, levels=10):
    k = rng.randint(0, max_breaks)
    bps = sorted(set(Fraction(rng.randint(1, denom // 2 - 1), denom) for _ in range(k)))
    vals = [Fraction(rng.randint(0, levels), levels) for _ in range(len(bps) + 1)]
    return antisymmetric_from_lower(bps, vals)


@st.composite
def graphs(draw, max_vertices=6, max_edges=10):
    n = draw(st.integers(2, max_vertices))
    m = draw(st.integers(1, max_edges))
    edges = []
    for _ in range(m):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 2))
        if v >= u:
            v += 1
        w = Fraction(draw(st.integers(1, 12)), draw(st.sampled_from([1, 2, 3, 4, 6])))
        edges.append((u, v, w))
    return WeightedDigraph(n, tuple(edges))


@st.composite
def antisymmetric_functions(draw, max_breaks=3):
    bps = sorted(set(draw(st.lists(st.integers(1, 19), max_size=max_breaks))))
    bps = [Fraction(b, 40) for b in bps]
    vals = [Fraction(draw(st.integers(0, 8)), 8) for _ in range(len(bps) + 1)]
    return antisymmetric_from_lower(bps, vals)


@pytest.fixture
def rng():
    return random.Random(20240601)
