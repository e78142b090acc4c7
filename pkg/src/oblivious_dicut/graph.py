"""Weighted directed graphs, cuts, biases and expected cut weights.

Weights are stored as :class:`fractions.Fraction`; every function here is
exact unless its name says otherwise (``monte_carlo_*``, ``*_float``).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import LimitExceeded, ParseError, ZeroWeightGraph
from .rational import format_fraction, parse_number, to_fraction

__all__ = [
    "WeightedDigraph",
    "Edge",
    "cut_weight",
    "outweights",
    "inweights",
    "biases",
    "expected_cut_weight",
    "approximation_ratio_on",
    "brute_force_opt",
    "max_brute_vertices",
    "invert",
    "disjoint_union",
    "replicate",
    "expand_to_unweighted",
    "unweighted_scale",
    "integer_weight_graph",
    "expansion_factor",
    "monte_carlo_cut_weight",
    "parse_graph",
    "format_graph",
    "read_graph",
    "write_graph",
]

HALF = Fraction(1, 2)
DEFAULT_MAX_BRUTE = 24
DEFAULT_MAX_EXPANSION = 4096

Edge = tuple  # (source, target, Fraction weight)


@dataclass(frozen=True)
class WeightedDigraph:
    """A directed multigraph on vertices ``0 .. vertex_count-1``.

    ``labels`` is cosmetic (gadget vertex names) and is ignored by equality.
    """

    vertex_count: int
    edges: tuple
    labels: tuple | None = None

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be nonnegative")
        clean = []
        for e in self.edges:
            u, v, w = e
            u, v, w = int(u), int(v), to_fraction(w)
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u}, {v}) has a vertex out of range")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if w <= 0:
                raise ValueError(f"edge ({u}, {v}) has nonpositive weight {w}")
            clean.append((u, v, w))
        object.__setattr__(self, "edges", tuple(clean))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.vertex_count:
                raise ValueError("labels must name every vertex")
            object.__setattr__(self, "labels", labels)

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.vertex_count == other.vertex_count and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertex_count, self.edges))

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.edges), Fraction(0))

    def vertex(self, label: str) -> int:
        """Vertex id for a label (gadget graphs only)."""
        if self.labels is None:
            raise KeyError(label)
        return self.labels.index(label)

    def sorted_edges(self):
        return sorted(self.edges)


def _check_selected(g: WeightedDigraph, selected) -> frozenset:
    s = frozenset(int(v) for v in selected)
    for v in s:
        if not 0 <= v < g.vertex_count:
            raise ValueError(f"vertex {v} out of range for a {g.vertex_count}-vertex graph")
    return s


def cut_weight(g: WeightedDigraph, selected: Iterable[int]) -> Fraction:
    """Weight of edges leaving ``selected``."""
    s = _check_selected(g, selected)
    return sum((w for u, v, w in g.edges if u in s and v not in s), Fraction(0))


def outweights(g: WeightedDigraph) -> list:
    out = [Fraction(0)] * g.vertex_count
    for u, _, w in g.edges:
        out[u] += w
    return out


def inweights(g: WeightedDigraph) -> list:
    inn = [Fraction(0)] * g.vertex_count
    for _, v, w in g.edges:
        inn[v] += w
    return inn


def biases(g: WeightedDigraph) -> list:
    """Per-vertex bias out/(out+in); isolated vertices get 1/2."""
    out, inn = outweights(g), inweights(g)
    result = []
    for o, i in zip(out, inn):
        total = o + i
        result.append(o / total if total else HALF)
    return result


def _require_weight(g: WeightedDigraph) -> None:
    if not g.edges:
        raise ZeroWeightGraph("graph has zero total weight; ratio undefined")


def selection_probabilities(g: WeightedDigraph, f) -> list:
    return [f(b) for b in biases(g)]


def expected_cut_weight(g: WeightedDigraph, f) -> Fraction:
    """Exact expected cut weight when each vertex is selected with f(bias).

    ``f`` is any callable mapping a Fraction bias to a probability; step
    functions return Fractions so the result is exact.
    """
    _require_weight(g)
    p = selection_probabilities(g, f)
    return sum((w * p[u] * (1 - p[v]) for u, v, w in g.edges), Fraction(0))


def approximation_ratio_on(g: WeightedDigraph, f, opt=None) -> Fraction:
    """Expected cut weight of ``f`` divided by the optimum (brute force if not given)."""
    if opt is None:
        opt = brute_force_opt(g)[1]
    if opt == 0:
        raise ZeroWeightGraph("optimal cut has zero weight")
    return expected_cut_weight(g, f) / opt


def max_brute_vertices() -> int:
    value = os.environ.get("OBLIVIOUS_DICUT_MAX_BRUTE")
    if value is None:
        return DEFAULT_MAX_BRUTE
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"OBLIVIOUS_DICUT_MAX_BRUTE must be an integer, got {value!r}")


def _integer_weights(weights: Sequence[Fraction]):
    scale = 1
    for w in weights:
        scale = scale * w.denominator // math.gcd(scale, w.denominator)
    return [int(w * scale) for w in weights], scale


def brute_force_opt(g: WeightedDigraph, limit: int | None = None):
    """Maximum directed cut by enumerating all 2^n vertex subsets.

    Returns ``(selected, weight)``. Among optimal cuts the one whose bitmask
    (bit v set iff v selected) is numerically smallest wins.
    """
    if limit is None:
        limit = max_brute_vertices()
    n = g.vertex_count
    if n > limit:
        raise LimitExceeded(f"brute force limited to {limit} vertices, graph has {n}")
    if not g.edges or n == 0:
        return frozenset(), Fraction(0)

    src = np.array([u for u, _, _ in g.edges], dtype=np.int64)
    dst = np.array([v for _, v, _ in g.edges], dtype=np.int64)
    int_w, scale = _integer_weights([w for _, _, w in g.edges])
    exact = sum(int_w) < 2**62
    wvec = np.array(int_w, dtype=np.int64) if exact else np.array(
        [float(w) for _, _, w in g.edges]
    )

    total = 1 << n
    chunk = 1 << min(n, 16)
    while chunk > 1 and chunk * len(g.edges) > (1 << 22):
        chunk >>= 1
    best_val = None
    best_mask = None
    near = []
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        su = (masks[:, None] >> src[None, :]) & 1
        sv = (masks[:, None] >> dst[None, :]) & 1
        vals = (su * (1 - sv)) @ wvec
        k = int(np.argmax(vals))
        if exact:
            # argmax returns the first maximiser, i.e. the smallest mask
            if best_val is None or vals[k] > best_val:
                best_val, best_mask = vals[k], int(masks[k])
        else:
            if best_val is None or vals[k] > best_val:
                best_val = vals[k]
            tol = 1e-9 * abs(best_val)
            near = [(m, x) for m, x in near if x >= best_val - tol]
            near.extend((int(m), float(x)) for m, x in zip(masks[vals >= best_val - tol][:64], vals[vals >= best_val - tol][:64]))

    def mask_set(mask):
        return frozenset(v for v in range(n) if mask >> v & 1)

    if exact:
        return mask_set(best_mask), Fraction(int(best_val), scale)
    scored = [(cut_weight(g, mask_set(m)), -m) for m, _ in near]
    weight, neg_mask = max(scored)
    return mask_set(-neg_mask), weight


def invert(g: WeightedDigraph) -> WeightedDigraph:
    """Reverse every edge, keeping weights."""
    return WeightedDigraph(g.vertex_count, tuple((v, u, w) for u, v, w in g.edges), g.labels)


def disjoint_union(graphs: Sequence[WeightedDigraph], scales: Sequence | None = None) -> WeightedDigraph:
    """Disjoint union; component i gets its vertices shifted and weights scaled by ``scales[i]``."""
    graphs = list(graphs)
    if not graphs:
        raise ValueError("disjoint_union needs at least one graph")
    if scales is None:
        scales = [1] * len(graphs)
    scales = [to_fraction(s) for s in scales]
    if len(scales) != len(graphs):
        raise ValueError("one scale per graph is required")
    if any(s <= 0 for s in scales):
        raise ValueError("scales must be positive")
    edges = []
    labels = [] if all(g.labels is not None for g in graphs) else None
    offset = 0
    for k, (g, s) in enumerate(zip(graphs, scales)):
        edges.extend((u + offset, v + offset, w * s) for u, v, w in g.edges)
        if labels is not None:
            labels.extend(f"{name}#{k}" for name in g.labels)
        offset += g.vertex_count
    return WeightedDigraph(offset, tuple(edges), labels)


def replicate(g: WeightedDigraph, k: int) -> WeightedDigraph:
    if k < 1:
        raise ValueError("k must be at least 1")
    return disjoint_union([g] * k)


def unweighted_scale(g: WeightedDigraph):
    """``(W, M)``: the maximum weight and the common denominator of w/W."""
    if not g.edges:
        raise ZeroWeightGraph("cannot expand a graph without edges")
    top = max(w for _, _, w in g.edges)
    m = 1
    for _, _, w in g.edges:
        d = (w / top).denominator
        m = m * d // math.gcd(m, d)
    return top, m


def integer_weight_graph(g: WeightedDigraph) -> WeightedDigraph:
    """g with every weight w replaced by the integer w_e = M w / W."""
    top, m = unweighted_scale(g)
    return WeightedDigraph(g.vertex_count, tuple((u, v, w / top * m) for u, v, w in g.edges), g.labels)


def expansion_factor(g: WeightedDigraph) -> Fraction:
    """Ratio of expanded to original expected (and cut) weights: M^2 / W."""
    top, m = unweighted_scale(g)
    return Fraction(m * m) / top


def expand_to_unweighted(g: WeightedDigraph, max_copies: int = DEFAULT_MAX_EXPANSION) -> WeightedDigraph:
    """Replace a rational-weight graph by an unweighted one with the same biases.

    Weights are divided by the maximum weight W and written as w_e/M. Vertex v
    becomes copies ``v*M .. v*M+M-1`` and each edge (u, v) becomes a
    w_e-regular circulant bipartite digraph: copy j of u points at copies
    j, j+1, ..., j+w_e-1 (mod M) of v. Expected cut weights are M times those
    of the integer-weight graph (weights w_e), i.e. M^2/W times those of g.
    """
    top, m = unweighted_scale(g)
    if m > max_copies:
        raise LimitExceeded(f"expansion needs {m} copies per vertex, limit is {max_copies}")
    edges = []
    for u, v, w in g.edges:
        we = w / top * m
        assert we.denominator == 1
        we = int(we)
        for j in range(m):
            for t in range(we):
                edges.append((u * m + j, v * m + (j + t) % m, 1))
    labels = None
    if g.labels is not None:
        labels = [f"{name}.{j}" for name in g.labels for j in range(m)]
    return WeightedDigraph(g.vertex_count * m, tuple(edges), labels)


def monte_carlo_cut_weight(g: WeightedDigraph, f, trials: int, seed: int, batch: int = 20000):
    """Sample mean and standard error of the cut weight under independent selection."""
    _require_weight(g)
    rng = np.random.default_rng(seed)
    p = np.array([float(x) for x in selection_probabilities(g, f)])
    src = np.array([u for u, _, _ in g.edges])
    dst = np.array([v for _, v, _ in g.edges])
    w = np.array([float(x) for _, _, x in g.edges])
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        sel = rng.random((k, g.vertex_count)) < p
        vals = (sel[:, src] & ~sel[:, dst]) @ w
        total += vals.sum()
        total_sq += (vals * vals).sum()
        done += k
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
    return mean, math.sqrt(var / trials)


# --- text format -----------------------------------------------------------

GRAPH_HEADER = "dicut-graph"


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


LABELS_PREFIX = "# labels:"


def parse_graph(text: str, source: str | None = None) -> WeightedDigraph:
    """Parse ``dicut-graph v1`` text."""
    header_seen = False
    n = 0
    edges = []
    named = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith(LABELS_PREFIX):
            for tok in raw[len(LABELS_PREFIX):].split():
                idx, _, name = tok.partition("=")
                if idx.isdigit() and name:
                    named[int(idx)] = name
        line = _strip_comment(raw)
        if not line.strip():
            continue
        tokens = line.split()
        col = raw.index(tokens[0]) + 1
        if not header_seen:
            if len(tokens) != 3 or tokens[0] != GRAPH_HEADER:
                raise ParseError("expected header 'dicut-graph v1 <vertex_count>'", lineno, col, source)
            if tokens[1] != "v1":
                raise ParseError(f"unsupported version {tokens[1]!r}", lineno, raw.index(tokens[1]) + 1, source)
            try:
                n = int(tokens[2])
            except ValueError:
                raise ParseError("vertex count must be an integer", lineno, raw.index(tokens[2]) + 1, source)
            if n < 0:
                raise ParseError("vertex count must be nonnegative", lineno, raw.index(tokens[2]) + 1, source)
            header_seen = True
            continue
        if len(tokens) != 3:
            raise ParseError("expected '<src> <dst> <weight>'", lineno, col, source)
        pos = 0
        cols = []
        for t in tokens:
            pos = raw.index(t, pos)
            cols.append(pos + 1)
            pos += len(t)
        try:
            u = int(tokens[0])
        except ValueError:
            raise ParseError(f"bad vertex id {tokens[0]!r}", lineno, cols[0], source)
        try:
            v = int(tokens[1])
        except ValueError:
            raise ParseError(f"bad vertex id {tokens[1]!r}", lineno, cols[1], source)
        for x, c in ((u, cols[0]), (v, cols[1])):
            if not 0 <= x < n:
                raise ParseError(f"vertex {x} out of range 0..{n - 1}", lineno, c, source)
        if u == v:
            raise ParseError("self-loops are not allowed", lineno, cols[0], source)
        try:
            w = parse_number(tokens[2])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, cols[2], source)
        if w <= 0:
            raise ParseError("edge weight must be positive", lineno, cols[2], source)
        edges.append((u, v, w))
    if not header_seen:
        raise ParseError("missing 'dicut-graph v1' header", None, None, source)
    # labels are cosmetic; keep them only when the comment names every vertex
    labels = tuple(named[v] for v in range(n)) if n and set(named) == set(range(n)) else None
    return WeightedDigraph(n, tuple(edges), labels)


def format_graph(g: WeightedDigraph) -> str:
    lines = [f"{GRAPH_HEADER} v1 {g.vertex_count}"]
    if g.labels is not None:
        lines.append(LABELS_PREFIX + " " + " ".join(f"{i}={name}" for i, name in enumerate(g.labels)))
    lines.extend(f"{u} {v} {format_fraction(w)}" for u, v, w in g.edges)
    return "\n".join(lines) + "\n"


def read_graph(path) -> WeightedDigraph:
    with open(path) as fh:
        return parse_graph(fh.read(), source=str(path))


def write_graph(g: WeightedDigraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))
