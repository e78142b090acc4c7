"""Uniform and greedy baselines, and mixed / max portfolios of algorithms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph import WeightedDigraph, biases, cut_weight, expected_cut_weight
from .rational import to_fraction
from .selection import StepFunction, make_uniform

__all__ = [
    "Oblivious",
    "Greedy",
    "PortfolioSpec",
    "greedy_cut",
    "member_expected_weight",
    "portfolio_maxexp",
    "portfolio_mix",
    "portfolio_expmax",
    "parse_member",
    "uniform_greedy_portfolio",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Oblivious:
    function: StepFunction
    name: str = "oblivious"


@dataclass(frozen=True)
class Greedy:
    """Deterministic: select every vertex whose outweight is at least its inweight."""

    name: str = "greedy"


@dataclass(frozen=True)
class PortfolioSpec:
    members: tuple
    mix_weights: tuple | None = None

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("a portfolio needs at least one member")
        for m in members:
            if not isinstance(m, (Oblivious, Greedy)):
                raise TypeError(f"unsupported portfolio member {m!r}")
        object.__setattr__(self, "members", members)
        if self.mix_weights is not None:
            weights = tuple(to_fraction(w) for w in self.mix_weights)
            if len(weights) != len(members):
                raise ValueError("one mix weight per member is required")
            if any(w < 0 for w in weights) or sum(weights) != 1:
                raise ValueError("mix weights must be nonnegative and sum to 1")
            object.__setattr__(self, "mix_weights", weights)


def greedy_cut(g: WeightedDigraph) -> frozenset:
    return frozenset(v for v, b in enumerate(biases(g)) if b >= HALF)


def member_expected_weight(g: WeightedDigraph, member) -> Fraction:
    if isinstance(member, Greedy):
        return cut_weight(g, greedy_cut(g))
    return expected_cut_weight(g, member.function)


def portfolio_maxexp(g: WeightedDigraph, p: PortfolioSpec) -> Fraction:
    """Best member by exact expected weight."""
    return max(member_expected_weight(g, m) for m in p.members)


def portfolio_mix(g: WeightedDigraph, p: PortfolioSpec) -> Fraction:
    """Expected weight when one member is drawn with the mix weights."""
    if p.mix_weights is None:
        raise ValueError("mix evaluation needs mix_weights")
    return sum(
        (w * member_expected_weight(g, m) for w, m in zip(p.mix_weights, p.members)),
        Fraction(0),
    )


def portfolio_expmax(g: WeightedDigraph, p: PortfolioSpec, seed, trials: int, batch: int = 20000):
    """Monte-Carlo estimate of E[max over members of the cut weight].

    Members draw independently of each other in every trial. Returns
    ``(mean, standard_error)``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    b = biases(g)
    src = np.array([u for u, _, _ in g.edges], dtype=np.int64)
    dst = np.array([v for _, v, _ in g.edges], dtype=np.int64)
    w = np.array([float(x) for _, _, x in g.edges])
    probs = []
    for m in p.members:
        if isinstance(m, Greedy):
            sel = greedy_cut(g)
            probs.append(np.array([1.0 if v in sel else 0.0 for v in range(g.vertex_count)]))
        else:
            probs.append(np.array([float(m.function(x)) for x in b]))
    s = s2 = 0.0
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        best = np.full(k, -np.inf)
        for pv in probs:
            sel = rng.random((k, g.vertex_count)) < pv
            best = np.maximum(best, (sel[:, src] & ~sel[:, dst]) @ w)
        s += best.sum()
        s2 += (best * best).sum()
        done += k
    mean = s / trials
    var = max(s2 / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
    return mean, float(np.sqrt(var / trials))


def parse_member(text: str, resolve_function) -> Oblivious | Greedy:
    """``greedy`` or anything ``resolve_function`` maps to a step function."""
    if text == "greedy":
        return Greedy()
    return Oblivious(resolve_function(text), name=text)


def uniform_greedy_portfolio(mix_greedy: Fraction | None = None) -> PortfolioSpec:
    weights = None
    if mix_greedy is not None:
        gamma = to_fraction(mix_greedy)
        weights = (1 - gamma, gamma)
    return PortfolioSpec((Oblivious(make_uniform(), "uniform"), Greedy()), weights)
