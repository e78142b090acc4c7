"""Adversarial graphs that cap the ratio of every oblivious algorithm.

G1 wants the probability at bias c/(c+1) close to 1/2, G2 wants it far
from 1/2; one G1 plus three G2 at c = 5/4 leaves no antisymmetric function
a ratio above 533/1088.
"""

from __future__ import annotations

from fractions import Fraction

from .graph import (
    WeightedDigraph,
    biases,
    brute_force_opt,
    cut_weight,
    disjoint_union,
    expected_cut_weight,
)
from .rational import to_fraction
from .selection import StepFunction, antisymmetric_from_lower

__all__ = [
    "build_g1",
    "build_g2",
    "build_combined",
    "combined_opt",
    "gadget_ratio",
    "combined_ratio_formula",
    "gadget_function",
    "best_alpha",
    "tight_example_38",
    "tight_example_25",
    "even_cycle",
    "even_cycle_ratio",
    "nonsymmetric_bound",
]

HALF = Fraction(1, 2)


class GadgetMismatch(AssertionError):
    """A gadget failed its own bias or cut-value self-check."""


def _check_c(c) -> Fraction:
    c = to_fraction(c)
    if c <= 1:
        raise ValueError(f"gadgets need c > 1, got {c}")
    return c


def _verify(g: WeightedDigraph, expected_bias: dict, cut_labels, cut_value) -> None:
    b = biases(g)
    for label, want in expected_bias.items():
        got = b[g.vertex(label)]
        if got != want:
            raise GadgetMismatch(f"bias of {label} is {got}, expected {want}")
    s = {g.vertex(x) for x in cut_labels}
    if cut_weight(g, s) != cut_value:
        raise GadgetMismatch(f"cut {sorted(cut_labels)} has weight {cut_weight(g, s)}, expected {cut_value}")
    opt = brute_force_opt(g)[1]
    if opt != cut_value:
        raise GadgetMismatch(f"optimal cut is {opt}, expected {cut_value}")


def build_g1(c) -> WeightedDigraph:
    """Six vertices; optimum 2c^2 by selecting A, B and C."""
    c = _check_c(c)
    c2 = c * c - 1
    labels = ("A", "A'", "B", "B'", "C", "C'")
    A, A_, B, B_, C, C_ = range(6)
    edges = (
        (A, A_, 1),
        (A, B_, c2),
        (B, C_, c2),
        (C, C_, 1),
        (A_, A, c),
        (B_, B, c2),
        (C_, C, c),
    )
    g = WeightedDigraph(6, edges, labels)
    hi, lo = c / (c + 1), 1 / (c + 1)
    _verify(g, {"A": hi, "A'": hi, "B": HALF, "B'": HALF, "C": lo, "C'": lo}, "ABC", 2 * c * c)
    return g


def build_g2(c) -> WeightedDigraph:
    """Four vertices; optimum 2c by selecting D and E."""
    c = _check_c(c)
    labels = ("D", "E", "E'", "F'")
    D, E, E_, F_ = range(4)
    edges = (
        (D, E_, c),
        (E, F_, c),
        (E_, E, c - 1),
        (E_, D, 1),
        (F_, E, 1),
    )
    g = WeightedDigraph(4, edges, labels)
    _verify(g, {"D": c / (c + 1), "E": HALF, "E'": HALF, "F'": 1 / (c + 1)}, "DE", 2 * c)
    return g


def build_combined(c, k1: int = 1, k2: int = 3) -> WeightedDigraph:
    if k1 < 0 or k2 < 0 or k1 + k2 == 0:
        raise ValueError("need a nonnegative number of copies, at least one in total")
    return disjoint_union([build_g1(c)] * k1 + [build_g2(c)] * k2)


def combined_opt(c, k1: int = 1, k2: int = 3) -> Fraction:
    """Optimum of the combined graph: optima add over disjoint components."""
    c = _check_c(c)
    if k1 < 0 or k2 < 0 or k1 + k2 == 0:
        raise ValueError("need a nonnegative number of copies, at least one in total")
    return k1 * 2 * c * c + k2 * 2 * c


def gadget_ratio(c, alpha, k1: int = 1, k2: int = 3) -> Fraction:
    """Ratio on k1 copies of G1 plus k2 copies of G2 when the selection
    probability is alpha at bias c/(c+1), 1 - alpha at 1/(c+1) and 1/2 at 1/2."""
    c = _check_c(c)
    a = to_fraction(alpha)
    if not 0 <= a <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    q = a + Fraction(1, 4)
    g1 = 2 * a * (1 - a) * (1 + c) + q * (c * c - 1)
    g2 = 1 + q * (c - 1)
    return (k1 * g1 + k2 * g2) / combined_opt(c, k1, k2)


def combined_ratio_formula(c, alpha) -> Fraction:
    """Closed form for one G1 plus three G2:
    (2a(1-a)(1+c) + (a+1/4)(c^2-1) + 3 + 3(a+1/4)(c-1)) / (2c^2 + 6c)."""
    return gadget_ratio(c, alpha, 1, 3)


def best_alpha(c, k1: int = 1, k2: int = 3) -> Fraction:
    """Maximiser of :func:`gadget_ratio` over alpha in [0, 1]."""
    c = _check_c(c)
    # numerator = -2 k1 (1+c) a^2 + lin * a + const
    lin = k1 * (2 * (1 + c) + c * c - 1) + k2 * (c - 1)
    if k1 == 0:
        return Fraction(1) if lin > 0 else Fraction(0)
    a = lin / (4 * k1 * (1 + c))
    return min(Fraction(1), max(Fraction(0), a))


def gadget_function(c, alpha) -> StepFunction:
    """Antisymmetric step function worth alpha around c/(c+1), 1/2 around 1/2
    and 1 - alpha around 1/(c+1)."""
    c = _check_c(c)
    a = to_fraction(alpha)
    cut = (1 / (c + 1) + HALF) / 2
    return antisymmetric_from_lower([cut], [1 - a, HALF])


def tight_example_38() -> WeightedDigraph:
    """X -> Y of weight 2/3 and Y -> X of weight 1/3."""
    return WeightedDigraph(2, ((0, 1, Fraction(2, 3)), (1, 0, Fraction(1, 3))), ("X", "Y"))


def tight_example_25(eps) -> WeightedDigraph:
    """X -> Z (2), X -> Y (3), Y -> X (3 + eps): greedy gets 2, the optimum is 5."""
    eps = to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    X, Y, Z = range(3)
    return WeightedDigraph(3, ((X, Z, 2), (X, Y, 3), (Y, X, 3 + eps)), ("X", "Y", "Z"))


def even_cycle(k: int) -> WeightedDigraph:
    """Directed cycle on 2k vertices with unit weights."""
    if k < 1:
        raise ValueError("k must be positive")
    n = 2 * k
    return WeightedDigraph(n, tuple((i, (i + 1) % n, 1) for i in range(n)))


def even_cycle_ratio(f) -> Fraction:
    """Every vertex of an even cycle has bias 1/2 and the optimum takes half the edges."""
    p = f(HALF)
    return 2 * p * (1 - p)


def _ratio_on_combined(f, c, k1, k2) -> Fraction:
    g = build_combined(c, k1, k2)
    return expected_cut_weight(g, f) / combined_opt(c, k1, k2)


def nonsymmetric_bound(f: StepFunction, c=Fraction(5, 4), k1: int = 1, k2: int = 3) -> Fraction:
    """Upper bound on the ratio of any (possibly non-antisymmetric) f: the
    smaller of its ratio on the combined gadget graph and on a long even cycle."""
    return min(_ratio_on_combined(f, c, k1, k2), even_cycle_ratio(f))
