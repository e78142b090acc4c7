from fractions import Fraction

import pytest
from hypothesis import given

from oblivious_dicut.algorithms import (
    Greedy,
    Oblivious,
    PortfolioSpec,
    greedy_cut,
    member_expected_weight,
    parse_member,
    portfolio_expmax,
    portfolio_maxexp,
    portfolio_mix,
    uniform_greedy_portfolio,
)
from oblivious_dicut.bounds import tight_example_25
from oblivious_dicut.graph import WeightedDigraph, brute_force_opt, cut_weight, expected_cut_weight, replicate
from oblivious_dicut.selection import make_f_delta, make_uniform, named_function

from conftest import graphs, random_graph

F = Fraction
EPS = F(1, 1000)


def test_greedy_single_edge():
    g = WeightedDigraph(2, ((0, 1, F(5, 2)),))
    assert greedy_cut(g) == {0}
    assert member_expected_weight(g, Greedy()) == F(5, 2)


def test_greedy_takes_balanced_vertices():
    g = WeightedDigraph(2, ((0, 1, 1), (1, 0, 1)))
    assert greedy_cut(g) == {0, 1}
    assert member_expected_weight(g, Greedy()) == 0


def test_two_fifths_example():
    g = tight_example_25(EPS)
    assert greedy_cut(g) == {0, 1}
    assert cut_weight(g, greedy_cut(g)) == 2
    assert brute_force_opt(g)[1] == 5
    assert expected_cut_weight(g, make_uniform()) == 2 + EPS / 4
    p = uniform_greedy_portfolio()
    assert portfolio_maxexp(g, p) == 2 + EPS / 4


def test_two_fifths_mix():
    g = tight_example_25(EPS)
    gamma = F(1, 5)
    p = uniform_greedy_portfolio(gamma)
    total, opt = g.total_weight, brute_force_opt(g)[1]
    mix = portfolio_mix(g, p)
    assert mix == (1 - gamma) * (2 + EPS / 4) + gamma * 2
    # relative weight: uniform keeps a quarter, greedy at least 1 - 2 eps'
    eps_prime = 1 - opt / total
    assert mix / total >= (1 - gamma) / 4 + gamma * (1 - 2 * eps_prime)
    assert mix / opt == F(2, 5) + EPS / 25


def test_singleton_portfolio_semantics(rng):
    f = make_f_delta(F(1, 3))
    for _ in range(10):
        g = random_graph(rng)
        p = PortfolioSpec((Oblivious(f),), (1,))
        e = expected_cut_weight(g, f)
        assert portfolio_maxexp(g, p) == portfolio_mix(g, p) == e
        mean, se = portfolio_expmax(g, p, seed=1, trials=20000)
        assert abs(mean - float(e)) <= 4 * se + 1e-12


@given(graphs())
def test_uniform_member_is_a_quarter(g):
    assert member_expected_weight(g, Oblivious(make_uniform())) == g.total_weight / 4


@given(graphs(max_vertices=6, max_edges=10))
def test_greedy_relative_weight(g):
    total = g.total_weight
    eps = 1 - brute_force_opt(g)[1] / total
    assert cut_weight(g, greedy_cut(g)) / total >= 1 - 2 * eps


def test_expmax_dominates_maxexp(rng):
    p = PortfolioSpec((Oblivious(make_uniform()), Oblivious(make_f_delta(F(1, 3))), Greedy()))
    for seed in range(8):
        g = random_graph(rng, max_vertices=7, max_edges=12)
        mean, se = portfolio_expmax(g, p, seed=seed, trials=20000)
        assert mean >= float(portfolio_maxexp(g, p)) - 4 * se - 1e-12


def test_expmax_is_seeded():
    g = tight_example_25(EPS)
    p = uniform_greedy_portfolio()
    assert portfolio_expmax(g, p, 3, 5000) == portfolio_expmax(g, p, 3, 5000)
    with pytest.raises(ValueError):
        portfolio_expmax(g, p, 3, 0)


def test_replication_concentrates():
    # per copy, the max over members approaches the best member's expectation
    g = tight_example_25(F(1, 2))
    p = PortfolioSpec((Oblivious(make_uniform()), Oblivious(make_f_delta(F(1, 3)))))
    target = float(portfolio_maxexp(g, p))
    gaps = []
    for k in (1, 8, 64):
        mean, _ = portfolio_expmax(replicate(g, k), p, seed=k, trials=4000)
        gaps.append(mean / k - target)
    assert gaps[0] > gaps[1] > gaps[2] >= -0.01
    assert gaps[2] < 0.1


def test_mix_weight_validation():
    u = Oblivious(make_uniform())
    with pytest.raises(ValueError):
        PortfolioSpec(())
    with pytest.raises(ValueError):
        PortfolioSpec((u, Greedy()), (F(1, 2),))
    with pytest.raises(ValueError):
        PortfolioSpec((u, Greedy()), (F(1, 2), F(1, 3)))
    with pytest.raises(ValueError):
        PortfolioSpec((u, Greedy()), (F(3, 2), F(-1, 2)))
    with pytest.raises(TypeError):
        PortfolioSpec((make_uniform(),))
    with pytest.raises(ValueError):
        portfolio_mix(tight_example_25(EPS), PortfolioSpec((u,)))


def test_parse_member():
    assert parse_member("greedy", named_function) == Greedy()
    m = parse_member("f-delta:1/3", named_function)
    assert m.function == make_f_delta(F(1, 3)) and m.name == "f-delta:1/3"
