import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oblivious_dicut.bounds import build_g1, build_g2, tight_example_25, tight_example_38
from oblivious_dicut.errors import LimitExceeded, ParseError, ZeroWeightGraph
from oblivious_dicut.graph import (
    WeightedDigraph,
    approximation_ratio_on,
    biases,
    brute_force_opt,
    cut_weight,
    disjoint_union,
    expand_to_unweighted,
    expansion_factor,
    expected_cut_weight,
    format_graph,
    integer_weight_graph,
    invert,
    monte_carlo_cut_weight,
    parse_graph,
    replicate,
    unweighted_scale,
)
from oblivious_dicut.selection import make_f_delta, make_uniform

from conftest import antisymmetric_functions, graphs, random_graph

C = Fraction(5, 4)


def naive_cut(g, s):
    total = Fraction(0)
    for u, v, w in g.edges:
        if u in s and v not in s:
            total += w
    return total


def naive_opt(g):
    best = Fraction(-1)
    for r in range(g.vertex_count + 1):
        for s in itertools.combinations(range(g.vertex_count), r):
            best = max(best, naive_cut(g, set(s)))
    return best


def test_cut_weight_g1():
    g = build_g1(C)
    assert cut_weight(g, {g.vertex(x) for x in "ABC"}) == Fraction(25, 8)


def test_cut_weight_empty_side():
    g = tight_example_25(Fraction(1, 100))
    assert cut_weight(g, set()) == 0


def test_cut_weight_rejects_bad_vertex():
    with pytest.raises(ValueError):
        cut_weight(tight_example_38(), {5})


def test_cut_weight_matches_resummation(rng):
    for _ in range(50):
        g = random_graph(rng, max_vertices=6)
        s = {v for v in range(g.vertex_count) if rng.random() < 0.5}
        assert cut_weight(g, s) == naive_cut(g, s)


def test_biases_g1_g2():
    g1, g2 = build_g1(C), build_g2(C)
    assert biases(g1)[g1.vertex("A")] == Fraction(5, 9)
    assert biases(g2)[g2.vertex("E'")] == Fraction(1, 2)


def test_bias_of_sink_and_isolated_vertex():
    g = WeightedDigraph(3, ((0, 1, 3),))
    assert biases(g) == [1, 0, Fraction(1, 2)]


def test_expected_cut_weight_examples():
    cycle = WeightedDigraph(6, tuple((i, (i + 1) % 6, 1) for i in range(6)))
    assert expected_cut_weight(cycle, make_uniform()) == Fraction(3, 2)
    one = lambda x: Fraction(1)
    assert expected_cut_weight(cycle, one) == 0
    g = tight_example_38()
    assert expected_cut_weight(g, make_f_delta(Fraction(1, 3))) == Fraction(1, 4)
    assert brute_force_opt(g)[1] == Fraction(2, 3)


def test_expected_cut_weight_rejects_empty_graph():
    with pytest.raises(ZeroWeightGraph):
        expected_cut_weight(WeightedDigraph(2, ()), make_uniform())


def test_brute_force_examples():
    s, w = brute_force_opt(tight_example_25(Fraction(1, 100)))
    assert (s, w) == (frozenset({0}), 5)
    assert brute_force_opt(WeightedDigraph(2, ((0, 1, Fraction(7, 3)),))) == (frozenset({0}), Fraction(7, 3))
    assert brute_force_opt(build_g2(C))[1] == Fraction(5, 2)


def test_brute_force_tie_break_smallest_mask():
    # 0 -> 1 and 2 -> 3 with equal weights: {0, 2} is the only optimum,
    # but 0 -> 1, 1 -> 0 has two optima {0} (mask 1) and {1} (mask 2)
    g = WeightedDigraph(2, ((0, 1, 1), (1, 0, 1)))
    assert brute_force_opt(g)[0] == frozenset({0})


def test_brute_force_limit(monkeypatch):
    g = WeightedDigraph(5, ((0, 1, 1),))
    with pytest.raises(LimitExceeded):
        brute_force_opt(g, limit=4)
    monkeypatch.setenv("OBLIVIOUS_DICUT_MAX_BRUTE", "3")
    with pytest.raises(LimitExceeded):
        brute_force_opt(g)


def test_brute_force_matches_naive(rng):
    for _ in range(40):
        g = random_graph(rng, max_vertices=6, denominators=(1, 2, 3, 7))
        s, w = brute_force_opt(g)
        assert w == naive_opt(g)
        assert cut_weight(g, s) == w


def test_invert_involution(rng):
    g = random_graph(rng)
    assert invert(invert(g)) == g


def test_disjoint_union_gadget_graph():
    g = disjoint_union([build_g1(C), build_g2(C), build_g2(C), build_g2(C)], [1, 1, 1, 1])
    assert g.vertex_count == 18
    assert brute_force_opt(g)[1] == Fraction(85, 8)


def test_disjoint_union_errors():
    with pytest.raises(ValueError):
        disjoint_union([])
    with pytest.raises(ValueError):
        disjoint_union([tight_example_38()], [0])
    with pytest.raises(ValueError):
        disjoint_union([tight_example_38()], [1, 2])


def test_replicate_total_weight():
    g = tight_example_25(Fraction(1, 3))
    assert replicate(g, 3).total_weight == 3 * g.total_weight
    with pytest.raises(ValueError):
        replicate(g, 0)


@given(graphs(max_vertices=4, max_edges=5), graphs(max_vertices=4, max_edges=5),
       st.fractions(min_value=Fraction(1, 10), max_value=5), st.fractions(min_value=Fraction(1, 10), max_value=5))
@settings(max_examples=40)
def test_union_additive_and_scaled(g, h, a, b):
    u = disjoint_union([g, h], [a, b])
    assert brute_force_opt(u)[1] == a * brute_force_opt(g)[1] + b * brute_force_opt(h)[1]
    s = {0, g.vertex_count}
    assert cut_weight(u, s) == a * cut_weight(g, {0}) + b * cut_weight(h, {0})


@given(graphs(), antisymmetric_functions())
def test_reversal_invariance(g, f):
    assert expected_cut_weight(invert(g), f) == expected_cut_weight(g, f)


def test_reversal_changes_nonsymmetric_function():
    g = WeightedDigraph(2, ((0, 1, 2), (1, 0, 1)))
    one = lambda x: Fraction(4, 5)
    assert expected_cut_weight(g, one) == expected_cut_weight(invert(g), one)
    star = WeightedDigraph(4, ((0, 1, 1), (0, 2, 1), (3, 0, 1)))
    low = lambda x: Fraction(1) if x >= Fraction(1, 4) else Fraction(0)
    assert expected_cut_weight(star, low) == 2
    assert expected_cut_weight(invert(star), low) == 1


def test_approximation_ratio_on():
    g = tight_example_38()
    assert approximation_ratio_on(g, make_f_delta(Fraction(1, 3))) == Fraction(3, 8)


# --- Monte-Carlo agreement ---------------------------------------------------


def test_monte_carlo_agreement(rng):
    for k in range(5):
        g = random_graph(rng, max_vertices=7, max_edges=12)
        f = make_f_delta(Fraction(1, 3)) if k % 2 else make_uniform()
        mean, se = monte_carlo_cut_weight(g, f, 100_000, seed=k)
        assert abs(mean - float(expected_cut_weight(g, f))) <= 4 * se + 1e-12


def test_monte_carlo_is_seeded():
    g = tight_example_25(Fraction(1, 2))
    assert monte_carlo_cut_weight(g, make_uniform(), 1000, 7) == monte_carlo_cut_weight(g, make_uniform(), 1000, 7)


# --- weighted to unweighted ----------------------------------------------------


def test_expand_single_unit_edge():
    g = WeightedDigraph(2, ((0, 1, 1),))
    assert expand_to_unweighted(g) == g


def test_expand_two_thirds_example():
    g = WeightedDigraph(2, ((0, 1, Fraction(2, 3)), (1, 0, Fraction(1, 3))))
    assert unweighted_scale(g) == (Fraction(2, 3), 2)
    h = expand_to_unweighted(g)
    assert h.vertex_count == 4
    b = biases(h)
    assert b[0] == b[1] == Fraction(2, 3)
    assert b[2] == b[3] == Fraction(1, 3)
    assert all(w == 1 for _, _, w in h.edges)
    # every copy of u has two out-edges, every copy of v one
    outs = [sum(1 for u, _, _ in h.edges if u == x) for x in range(4)]
    assert outs == [2, 2, 1, 1]


def test_expand_scaling(rng):
    f = make_f_delta(Fraction(1, 3))
    for _ in range(20):
        g = random_graph(rng, max_vertices=4, max_edges=5, denominators=(1, 2, 3, 4))
        h = expand_to_unweighted(g)
        _, m = unweighted_scale(g)
        assert expected_cut_weight(h, f) == m * expected_cut_weight(integer_weight_graph(g), f)
        assert expected_cut_weight(h, f) == expansion_factor(g) * expected_cut_weight(g, f)
        if h.vertex_count <= 14:
            assert brute_force_opt(h)[1] >= m * brute_force_opt(integer_weight_graph(g))[1]


def test_expand_limit():
    g = WeightedDigraph(2, ((0, 1, 1), (1, 0, Fraction(1, 97))))
    with pytest.raises(LimitExceeded):
        expand_to_unweighted(g, max_copies=50)


# --- text format ---------------------------------------------------------------


def test_round_trip_rational_weights(rng):
    for _ in range(20):
        g = random_graph(rng, denominators=(1, 3, 7, 10**9 + 7))
        assert parse_graph(format_graph(g)) == g
        assert format_graph(parse_graph(format_graph(g))) == format_graph(g)


def test_labels_survive_round_trip():
    g = build_g1(C)
    h = parse_graph(format_graph(g))
    assert h.labels == g.labels
    # a partial label comment is ignored
    assert parse_graph("dicut-graph v1 2\n# labels: 0=X\n0 1 1\n").labels is None


def test_parse_decimals_and_comments():
    g = parse_graph("# a graph\ndicut-graph v1 3\n0 1 0.25  # quarter\n1 2 3/7\n\n")
    assert g.edges == ((0, 1, Fraction(1, 4)), (1, 2, Fraction(3, 7)))


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("dicut-graph v2 3\n", 1, 13),
        ("graph v1 3\n", 1, 1),
        ("dicut-graph v1 3\n0 1\n", 2, 1),
        ("dicut-graph v1 3\n0 5 1\n", 2, 3),
        ("dicut-graph v1 3\n0 1 -2\n", 2, 5),
        ("dicut-graph v1 3\n1 1 2\n", 2, 1),
        ("dicut-graph v1 3\n0 1 x/y\n", 2, 5),
    ],
)
def test_parse_errors_have_positions(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_graph(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_invalid_construction():
    with pytest.raises(ValueError):
        WeightedDigraph(2, ((0, 0, 1),))
    with pytest.raises(ValueError):
        WeightedDigraph(2, ((0, 1, 0),))
    with pytest.raises(ValueError):
        WeightedDigraph(2, ((0, 2, 1),))
