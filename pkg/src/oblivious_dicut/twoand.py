"""Max 2-AND instances and their reduction to Max DICUT.

A literal is a pair ``(variable, positive)`` with 0-based variable ids. In the
reduced graph literal ``(v, True)`` is vertex ``2v`` and ``(v, False)`` is
vertex ``2v + 1``. The text format numbers variables from 1 (``+3``, ``-1``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LimitExceeded, ParseError
from .graph import WeightedDigraph, max_brute_vertices
from .rational import format_fraction, parse_number, to_fraction

__all__ = [
    "TwoAndInstance",
    "literal_vertex",
    "assignment_weight",
    "variable_bias",
    "literal_bias",
    "reduce_to_dicut",
    "oblivious_expected_assignment",
    "sample_assignment",
    "sample_literal_cut",
    "monte_carlo_literal_cut",
    "brute_force_assignment",
    "assignment_to_cut",
    "parse_twoand",
    "format_twoand",
    "read_twoand",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class TwoAndInstance:
    variable_count: int
    clauses: tuple  # ((var, positive), (var, positive), weight)

    def __post_init__(self):
        clean = []
        for a, b, w in self.clauses:
            a = (int(a[0]), bool(a[1]))
            b = (int(b[0]), bool(b[1]))
            w = to_fraction(w)
            for var, _ in (a, b):
                if not 0 <= var < self.variable_count:
                    raise ValueError(f"variable {var} out of range")
            if a[0] == b[0]:
                raise ValueError("a clause must use two different variables")
            if w <= 0:
                raise ValueError("clause weights must be positive")
            clean.append((a, b, w))
        object.__setattr__(self, "clauses", tuple(clean))

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.clauses), Fraction(0))


def literal_vertex(lit) -> int:
    var, positive = lit
    return 2 * var + (0 if positive else 1)


def _literal_true(lit, assignment) -> bool:
    var, positive = lit
    return bool(assignment[var]) == positive


def assignment_weight(phi: TwoAndInstance, assignment) -> Fraction:
    if len(assignment) != phi.variable_count:
        raise ValueError("assignment must give every variable a value")
    return sum(
        (w for a, b, w in phi.clauses if _literal_true(a, assignment) and _literal_true(b, assignment)),
        Fraction(0),
    )


def _occurrences(phi: TwoAndInstance):
    pos = [Fraction(0)] * phi.variable_count
    tot = [Fraction(0)] * phi.variable_count
    for a, b, w in phi.clauses:
        for var, positive in (a, b):
            tot[var] += w
            if positive:
                pos[var] += w
    return pos, tot


def _all_biases(phi: TwoAndInstance) -> list:
    pos, tot = _occurrences(phi)
    return [p / t if t else HALF for p, t in zip(pos, tot)]


def variable_bias(phi: TwoAndInstance, var: int) -> Fraction:
    """Weight of positive occurrences over weight of all occurrences.

    A variable that never occurs gets 1/2 and a warning.
    """
    pos, tot = _occurrences(phi)
    if not tot[var]:
        warnings.warn(f"variable {var} occurs in no clause; using bias 1/2", stacklevel=2)
        return HALF
    return pos[var] / tot[var]


def literal_bias(phi: TwoAndInstance, lit) -> Fraction:
    b = _all_biases(phi)[lit[0]]
    return b if lit[1] else 1 - b


def reduce_to_dicut(phi: TwoAndInstance):
    """Graph on all 2n literals: clause y AND z of weight w gives the edges
    y -> not z and z -> not y, each of weight w/2.

    Returns ``(graph, literal_to_vertex)``.
    """
    edges = []
    for y, z, w in phi.clauses:
        not_y, not_z = (y[0], not y[1]), (z[0], not z[1])
        edges.append((literal_vertex(y), literal_vertex(not_z), w / 2))
        edges.append((literal_vertex(z), literal_vertex(not_y), w / 2))
    labels = []
    for v in range(phi.variable_count):
        labels.extend([f"x{v + 1}", f"~x{v + 1}"])
    mapping = {(v, s): literal_vertex((v, s)) for v in range(phi.variable_count) for s in (True, False)}
    return WeightedDigraph(2 * phi.variable_count, tuple(edges), tuple(labels)), mapping


def _truth_probabilities(phi: TwoAndInstance, f) -> list:
    return [f(b) for b in _all_biases(phi)]


def oblivious_expected_assignment(phi: TwoAndInstance, f) -> Fraction:
    """Expected satisfied weight when variable v is set true with probability f(bias(v))."""
    p = _truth_probabilities(phi, f)

    def prob(lit):
        return p[lit[0]] if lit[1] else 1 - p[lit[0]]

    return sum((w * prob(a) * prob(b) for a, b, w in phi.clauses), Fraction(0))


def sample_assignment(phi: TwoAndInstance, f, seed) -> tuple:
    rng = np.random.default_rng(seed)
    p = np.array([float(x) for x in _truth_probabilities(phi, f)])
    return tuple(bool(x) for x in rng.random(phi.variable_count) < p)


def assignment_to_cut(assignment) -> frozenset:
    """Literal vertices made true by an assignment."""
    return frozenset(literal_vertex((v, bool(val))) for v, val in enumerate(assignment))


def _literal_probabilities(phi: TwoAndInstance, f) -> np.ndarray:
    b = _all_biases(phi)
    p = np.empty(2 * phi.variable_count)
    for v, bv in enumerate(b):
        p[2 * v] = float(f(bv))
        p[2 * v + 1] = float(f(1 - bv))
    return p


def _sample_literals(phi, f, rng, k, consistent):
    n = phi.variable_count
    p = _literal_probabilities(phi, f)
    if consistent:
        pos = rng.random((k, n)) < p[0::2]
        sel = np.empty((k, 2 * n), dtype=bool)
        sel[:, 0::2] = pos
        sel[:, 1::2] = ~pos
        return sel
    return rng.random((k, 2 * n)) < p


def sample_literal_cut(phi: TwoAndInstance, f, seed, consistent: bool = False) -> frozenset:
    """Sample a cut of the reduced graph.

    Independent mode selects every literal vertex on its own with f of its
    bias. Consistent mode draws the positive literal and puts its negation on
    the other side, so the cut is always an assignment.
    """
    rng = np.random.default_rng(seed)
    sel = _sample_literals(phi, f, rng, 1, consistent)[0]
    return frozenset(int(v) for v in np.flatnonzero(sel))


def monte_carlo_literal_cut(phi: TwoAndInstance, f, trials: int, seed, consistent: bool = False, batch: int = 20000):
    """Mean and standard error of the reduced-graph cut weight."""
    g, _ = reduce_to_dicut(phi)
    rng = np.random.default_rng(seed)
    src = np.array([u for u, _, _ in g.edges])
    dst = np.array([v for _, v, _ in g.edges])
    w = np.array([float(x) for _, _, x in g.edges])
    s = s2 = 0.0
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        sel = _sample_literals(phi, f, rng, k, consistent)
        vals = (sel[:, src] & ~sel[:, dst]) @ w
        s += vals.sum()
        s2 += (vals * vals).sum()
        done += k
    mean = s / trials
    var = max(s2 / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
    return mean, math.sqrt(var / trials)


def brute_force_assignment(phi: TwoAndInstance, limit: int | None = None):
    """Best assignment by enumeration; ties go to the smallest bitmask
    (bit v set iff variable v is true)."""
    if limit is None:
        limit = max_brute_vertices()
    n = phi.variable_count
    if n > limit:
        raise LimitExceeded(f"brute force limited to {limit} variables, instance has {n}")
    best, best_mask = None, 0
    weights = [w for _, _, w in phi.clauses]
    scale = 1
    for w in weights:
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    iw = np.array([int(w * scale) for w in weights], dtype=object if sum(weights) * scale >= 2**62 else np.int64)
    va = np.array([a[0] for a, _, _ in phi.clauses], dtype=np.int64)
    sa = np.array([a[1] for a, _, _ in phi.clauses], dtype=np.int64)
    vb = np.array([b[0] for _, b, _ in phi.clauses], dtype=np.int64)
    sb = np.array([b[1] for _, b, _ in phi.clauses], dtype=np.int64)
    total = 1 << n
    chunk = 1 << min(n, 16)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        if len(phi.clauses):
            ta = ((masks[:, None] >> va[None, :]) & 1) == sa[None, :]
            tb = ((masks[:, None] >> vb[None, :]) & 1) == sb[None, :]
            vals = (ta & tb).astype(np.int64) @ iw
        else:
            vals = np.zeros(len(masks), dtype=np.int64)
        k = int(np.argmax(vals))
        if best is None or vals[k] > best:
            best, best_mask = vals[k], int(masks[k])
    assignment = tuple(bool(best_mask >> v & 1) for v in range(n))
    return assignment, Fraction(int(best), scale)


# --- text format -----------------------------------------------------------

TWOAND_HEADER = "twoand"


def _parse_literal(tok: str, n: int):
    if len(tok) < 2 or tok[0] not in "+-" or not tok[1:].isdigit():
        raise ValueError(f"bad literal {tok!r}; expected +k or -k")
    k = int(tok[1:])
    if not 1 <= k <= n:
        raise ValueError(f"variable {k} out of range 1..{n}")
    return (k - 1, tok[0] == "+")


def parse_twoand(text: str, source: str | None = None) -> TwoAndInstance:
    n = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        cols, pos = [], 0
        for t in tokens:
            pos = raw.index(t, pos)
            cols.append(pos + 1)
            pos += len(t)
        if n is None:
            if len(tokens) != 3 or tokens[:2] != [TWOAND_HEADER, "v1"]:
                raise ParseError("expected header 'twoand v1 <variable_count>'", lineno, cols[0], source)
            try:
                n = int(tokens[2])
            except ValueError:
                raise ParseError("variable count must be an integer", lineno, cols[2], source)
            continue
        if len(tokens) != 3:
            raise ParseError("expected '<lit> <lit> <weight>'", lineno, cols[0], source)
        lits = []
        for k in (0, 1):
            try:
                lits.append(_parse_literal(tokens[k], n))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, cols[k], source)
        if lits[0][0] == lits[1][0]:
            raise ParseError("a clause must use two different variables", lineno, cols[1], source)
        try:
            w = parse_number(tokens[2])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, cols[2], source)
        if w <= 0:
            raise ParseError("clause weight must be positive", lineno, cols[2], source)
        clauses.append((lits[0], lits[1], w))
    if n is None:
        raise ParseError("missing 'twoand v1' header", None, None, source)
    return TwoAndInstance(n, tuple(clauses))


def format_twoand(phi: TwoAndInstance) -> str:
    def lit(x):
        return f"{'+' if x[1] else '-'}{x[0] + 1}"

    lines = [f"{TWOAND_HEADER} v1 {phi.variable_count}"]
    lines.extend(f"{lit(a)} {lit(b)} {format_fraction(w)}" for a, b, w in phi.clauses)
    return "\n".join(lines) + "\n"


def read_twoand(path) -> TwoAndInstance:
    with open(path) as fh:
        return parse_twoand(fh.read(), source=str(path))
