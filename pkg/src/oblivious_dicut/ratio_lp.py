"""Factor-revealing LP for the worst-case ratio of a step selection function.

The LP describes a "bad" graph in aggregate. Every vertex of such a graph
falls into one of 2n sets: sets ``0..n-1`` lie inside the optimal cut S and
sets ``n..2n-1`` outside it, and set ``k`` and set ``k+n`` both collect the
vertices whose bias lies in interval ``k`` of the function. Variable
``e[i][j]`` is the total weight of edges from set i to set j. The cut S
has weight 1, every set's average bias stays inside its interval, and the
objective is the expected cut weight of the oblivious algorithm.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CertificateInvalid, ParseError, SolverError
from .graph import (
    WeightedDigraph,
    biases,
    cut_weight,
    expected_cut_weight,
    format_graph,
    parse_graph,
)
from .rational import format_fraction, parse_number
from .selection import StepFunction, evaluate, is_antisymmetric
from .simplex import (
    EQ,
    GE,
    LE,
    LinearProgram,
    Row,
    check_status,
    exact_basic_solution,
    simplex,
    to_standard_form,
)

log = logging.getLogger(__name__)

__all__ = [
    "LpInterval",
    "LpModel",
    "LpSolution",
    "RatioCertificate",
    "lp_intervals",
    "build_lp",
    "solve",
    "certify",
    "check_dual",
    "check_primal",
    "extract_witness",
    "witness_ratio_bound",
    "approximation_ratio",
    "format_certificate",
    "parse_certificate",
    "verify_certificate",
]

DEFAULT_TOL = 1e-9
DEFAULT_EPSILON_FRACTION = Fraction(1, 10**6)


@dataclass(frozen=True)
class LpInterval:
    lo: Fraction
    hi: Fraction
    prob: Fraction

    @property
    def zero_width(self) -> bool:
        return self.lo == self.hi


def lp_intervals(f: StepFunction) -> list:
    """Maximal intervals of constancy, plus a zero-width interval for every
    isolated point (a point value differing from both one-sided limits)."""
    g = f.canonical()
    b, vals, pts = g.breakpoints, g.interval_values, g.point_values
    out = []
    last = len(b) - 1
    for k in range(last + 1):
        left = vals[k - 1] if k > 0 else None
        right = vals[k] if k < last else None
        if pts[k] != left and pts[k] != right:
            out.append(LpInterval(b[k], b[k], pts[k]))
        if k < last:
            out.append(LpInterval(b[k], b[k + 1], evaluate(g, (b[k] + b[k + 1]) / 2)))
    return out


@dataclass
class LpModel:
    """The LP together with the bookkeeping needed to read its solution.

    ``orbits[v]`` lists the (i, j) edge-set pairs carried by variable v; it
    has one entry unless the model was reduced by reversal symmetry.
    """

    function: StepFunction
    intervals: list
    program: LinearProgram
    orbits: list
    row_labels: list
    sym_reduced: bool = False

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def num_sets(self) -> int:
        return 2 * len(self.intervals)

    @property
    def num_vars(self) -> int:
        return self.program.num_vars

    @property
    def num_rows(self) -> int:
        return len(self.program.rows)

    def set_interval(self, i: int) -> LpInterval:
        return self.intervals[i % self.n]

    def set_prob(self, i: int) -> Fraction:
        return self.intervals[i % self.n].prob

    def var_index(self, i: int, j: int) -> int:
        """Variable index of pair (i, j) in the unreduced model."""
        return i * self.num_sets + j


def _mirror_sets(intervals: list):
    """sigma(i): the set that set i becomes when every edge is reversed."""
    n = len(intervals)
    index = {(iv.lo, iv.hi): k for k, iv in enumerate(intervals)}
    sigma = []
    for i in range(2 * n):
        iv = intervals[i % n]
        k = index.get((1 - iv.hi, 1 - iv.lo))
        if k is None:
            raise ValueError("interval structure is not mirror symmetric")
        sigma.append(k + n if i < n else k)
    return sigma


def build_lp(f: StepFunction, sym_reduce: bool = False) -> LpModel:
    """Factor-revealing LP of ``f``.

    With ``sym_reduce`` (antisymmetric f only) each variable is tied to its
    image under edge reversal, roughly halving the variable count.
    """
    intervals = lp_intervals(f)
    n = len(intervals)
    N = 2 * n
    probs = [intervals[i % n].prob for i in range(N)]

    def var(i, j):
        return i * N + j

    rows = []
    labels = []
    rows.append(Row({var(i, j): Fraction(1) for i in range(n) for j in range(n, N)}, EQ, Fraction(1)))
    labels.append("cut")
    for i in range(N):
        iv = intervals[i % n]

        def bias_row(z):
            coeffs = {}
            for j in range(N):
                if j == i:
                    # e_ii is both an out- and an in-edge of set i
                    coeffs[var(i, i)] = 1 - 2 * z
                else:
                    coeffs[var(i, j)] = 1 - z
                    coeffs[var(j, i)] = -z
            return coeffs

        if iv.zero_width:
            rows.append(Row(bias_row(iv.lo), EQ))
            labels.append(f"bias[{i}]=")
        else:
            rows.append(Row(bias_row(iv.lo), GE))
            labels.append(f"bias[{i}]>=")
            rows.append(Row(bias_row(iv.hi), LE))
            labels.append(f"bias[{i}]<=")
    objective = [probs[i] * (1 - probs[j]) for i in range(N) for j in range(N)]
    orbits = [[(i, j)] for i in range(N) for j in range(N)]
    program = LinearProgram(objective, rows)
    model = LpModel(f, intervals, program, orbits, labels)
    if sym_reduce:
        model = _reduce_by_symmetry(model)
    return model


def _reduce_by_symmetry(model: LpModel) -> LpModel:
    if not is_antisymmetric(model.function):
        raise ValueError("symmetry reduction requires an antisymmetric function")
    N = model.num_sets
    sigma = _mirror_sets(model.intervals)
    seen = set()
    orbits = []
    for i in range(N):
        for j in range(N):
            if (i, j) in seen:
                continue
            image = (sigma[j], sigma[i])
            orbit = [(i, j)] if image == (i, j) else [(i, j), image]
            seen.update(orbit)
            orbits.append(orbit)
    full = model.program
    objective = []
    rows_coeffs = [dict() for _ in full.rows]
    col_of = {}
    for r, row in enumerate(full.rows):
        for v, a in row.coeffs.items():
            col_of.setdefault(v, []).append((r, a))
    for k, orbit in enumerate(orbits):
        cost = Fraction(0)
        for i, j in orbit:
            v = model.var_index(i, j)
            cost += full.objective[v]
            for r, a in col_of.get(v, ()):
                rows_coeffs[r][k] = rows_coeffs[r].get(k, 0) + a
        objective.append(cost)
    rows = [Row({k: a for k, a in c.items() if a}, row.sense, row.rhs) for c, row in zip(rows_coeffs, full.rows)]
    return LpModel(model.function, model.intervals, LinearProgram(objective, rows), orbits, model.row_labels, True)


# --- solving ---------------------------------------------------------------


@dataclass
class LpSolution:
    status: str
    primal: list  # float value per model variable
    objective: float
    duals: list  # float dual per model row (original row orientation)
    basis: list
    iterations: int
    seconds: float
    form: object = field(default=None, repr=False)


def solve(
    model: LpModel,
    tol: float = DEFAULT_TOL,
    max_iter: int = 500000,
    time_limit: float | None = None,
    rule: str = "dantzig",
) -> LpSolution:
    """Run the simplex method on the model and report a basic solution."""
    start = time.monotonic()
    sf = to_standard_form(model.program)
    res = simplex(sf, tol=tol, max_iter=max_iter, time_limit=time_limit, rule=rule)
    m = sf.num_rows
    duals = [float("nan")] * m
    if res.status == "optimal":
        B = np.zeros((m, m))
        for k, j in enumerate(res.basis):
            for r, a in sf.columns[j].items():
                B[r, k] = float(a)
        cb = np.array([float(sf.cost[j]) for j in res.basis])
        y = np.linalg.solve(B.T, cb)
        duals = [float(s * v) for s, v in zip(sf.row_sign, y)]
    primal = [float(v) for v in res.x[: model.num_vars]]
    return LpSolution(res.status, primal, res.objective, duals, res.basis, res.iterations,
                      time.monotonic() - start, sf)


# --- exact checks ----------------------------------------------------------


def check_dual(program: LinearProgram, y: list) -> Fraction:
    """Verify y is dual feasible for ``program`` exactly and return b.y.

    For min c.x over the rows with x >= 0 this means A^T y <= c, y >= 0 on
    ``>=`` rows and y <= 0 on ``<=`` rows. b.y is then a lower bound on the
    LP value.
    """
    if len(y) != len(program.rows):
        raise CertificateInvalid("dual vector has the wrong length")
    y = [Fraction(v) for v in y]
    lhs = [Fraction(0)] * program.num_vars
    for r, (row, yr) in enumerate(zip(program.rows, y)):
        if row.sense == GE and yr < 0:
            raise CertificateInvalid(f"dual of >= row {r} is negative")
        if row.sense == LE and yr > 0:
            raise CertificateInvalid(f"dual of <= row {r} is positive")
        if yr:
            for v, a in row.coeffs.items():
                lhs[v] += a * yr
    for v, (s, c) in enumerate(zip(lhs, program.objective)):
        if s > c:
            raise CertificateInvalid(f"dual constraint of variable {v} violated by {s - c}")
    return sum((row.rhs * yr for row, yr in zip(program.rows, y)), Fraction(0))


def check_primal(program: LinearProgram, x: list) -> Fraction:
    """Verify x is primal feasible exactly and return c.x (an upper bound)."""
    if len(x) != program.num_vars:
        raise CertificateInvalid("primal vector has the wrong length")
    x = [Fraction(v) for v in x]
    for v, val in enumerate(x):
        if val < 0:
            raise CertificateInvalid(f"primal variable {v} is negative")
    for r, row in enumerate(program.rows):
        s = sum((a * x[v] for v, a in row.coeffs.items()), Fraction(0))
        ok = {EQ: s == row.rhs, GE: s >= row.rhs, LE: s <= row.rhs}[row.sense]
        if not ok:
            raise CertificateInvalid(f"primal row {r} ({row.sense}) violated")
    return sum((c * v for c, v in zip(program.objective, x)), Fraction(0))


@dataclass
class CertifiedInterval:
    lower: Fraction
    upper: Fraction
    primal: list  # exact e_ij of the full (unreduced) model
    dual: list  # exact duals of the full model rows

    def __iter__(self):
        return iter((self.lower, self.upper))


def _full_model(model: LpModel) -> LpModel:
    return build_lp(model.function) if model.sym_reduced else model


def _expand_primal(model: LpModel, x: list) -> list:
    N = model.num_sets
    full = [Fraction(0)] * (N * N)
    for k, orbit in enumerate(model.orbits):
        for i, j in orbit:
            full[i * N + j] = x[k]
    return full


def _symmetrize_dual(model: LpModel, y: list) -> list:
    """Average y with its image under edge reversal (reduced models only)."""
    sigma = _mirror_sets(model.intervals)
    index = {label: r for r, label in enumerate(model.row_labels)}
    mirrored = []
    for r, label in enumerate(model.row_labels):
        if label == "cut":
            mirrored.append(y[r])
            continue
        i = int(label[label.index("[") + 1: label.index("]")])
        kind = label[label.index("]") + 1:]
        partner = {">=": "<=", "<=": ">=", "=": "="}[kind]
        mirrored.append(-y[index[f"bias[{sigma[i]}]{partner}"]])
    return [(a + b) / 2 for a, b in zip(y, mirrored)]


def certify(model: LpModel, solution: LpSolution) -> CertifiedInterval:
    """Recompute the basis solution exactly and check both sides.

    Returns ``[lower, upper]`` where lower is the objective of an exactly
    dual-feasible vector and upper that of an exactly primal-feasible one,
    both for the unreduced model. Raises :class:`CertificateInvalid` if
    either side fails.
    """
    if solution.status != "optimal":
        raise SolverError(f"cannot certify a {solution.status} solution")
    sf = solution.form if solution.form is not None else to_standard_form(model.program)
    x, y_std = exact_basic_solution(sf, solution.basis)
    for j in range(sf.num_structural + sf.num_slack, sf.num_columns):
        if x[j] != 0:
            raise CertificateInvalid("an artificial variable is nonzero")
    y = [s * v for s, v in zip(sf.row_sign, y_std)]
    primal = x[: model.num_vars]
    if model.sym_reduced:
        y = _symmetrize_dual(model, y)
        primal = _expand_primal(model, primal)
    full = _full_model(model)
    lower = check_dual(full.program, y)
    upper = check_primal(full.program, primal)
    return CertifiedInterval(lower, upper, primal, y)


# --- witness graphs --------------------------------------------------------


def extract_witness(model: LpModel, primal: list, epsilon_fraction=DEFAULT_EPSILON_FRACTION):
    """Turn an exact LP solution into a concrete graph and its cut S.

    One vertex per nonempty set; a set with internal weight e_ii is split
    into two halves joined by edges of weight e_ii/2 each way, which keeps
    every bias. A final auxiliary vertex (outside S) gets tiny edges to or
    from each vertex whose bias sits on an interval end where f takes a
    different value, nudging that bias into the open interval. Returns
    ``(graph, cut, epsilon)`` where epsilon is the auxiliary vertex's total
    weight.
    """
    full = _full_model(model)
    N = full.num_sets
    if len(primal) == model.num_vars and model.sym_reduced:
        primal = _expand_primal(model, primal)
    e = [[Fraction(primal[i * N + j]) for j in range(N)] for i in range(N)]
    f = model.function

    # vertex pieces: (set, part), part in {None, 'A', 'B'}
    pieces = {}
    for i in range(N):
        touched = any(e[i][j] or e[j][i] for j in range(N))
        if not touched:
            continue
        pieces[i] = ["A", "B"] if e[i][i] else [None]
    vid = {}
    labels = []
    for i, parts in pieces.items():
        for part in parts:
            vid[(i, part)] = len(labels)
            labels.append(f"T{i}" if part is None else f"{part}{i}")
    edges = []
    for i in pieces:
        for j in pieces:
            w = e[i][j]
            if i == j or not w:
                continue
            src, dst = pieces[i], pieces[j]
            share = w / (len(src) * len(dst))
            for a in src:
                for b in dst:
                    edges.append((vid[(i, a)], vid[(j, b)], share))
        if e[i][i]:
            edges.append((vid[(i, "A")], vid[(i, "B")], e[i][i] / 2))
            edges.append((vid[(i, "B")], vid[(i, "A")], e[i][i] / 2))
    n_vertices = len(labels)
    g = WeightedDigraph(n_vertices, tuple(edges), tuple(labels))
    cut = frozenset(vid[key] for key in vid if key[0] < model.n)
    total = g.total_weight

    # vertices stuck on an interval end with the wrong probability
    bias = biases(g)
    deg = [Fraction(0)] * n_vertices
    for u, v, w in g.edges:
        deg[u] += w
        deg[v] += w
    nudges = []
    for (i, part), v in vid.items():
        iv = model.set_interval(i)
        if iv.zero_width or evaluate(f, bias[v]) == iv.prob:
            continue
        if bias[v] == iv.lo:
            room = (iv.hi - iv.lo) * deg[v] / (1 - iv.hi) if iv.hi < 1 else None
            nudges.append((v, "out", room))
        elif bias[v] == iv.hi:
            room = (iv.hi - iv.lo) * deg[v] / iv.lo if iv.lo > 0 else None
            nudges.append((v, "in", room))
        else:
            raise CertificateInvalid(f"set {i} has bias {bias[v]} outside its interval")
    if not nudges:
        return g, cut, Fraction(0)
    share = Fraction(epsilon_fraction) * total / len(nudges)
    rooms = [r for _, _, r in nudges if r is not None]
    if rooms:
        share = min(share, min(rooms) / 2)
    aux = n_vertices
    extra = []
    for v, direction, _ in nudges:
        extra.append((v, aux, share) if direction == "out" else (aux, v, share))
    g = WeightedDigraph(n_vertices + 1, g.edges + tuple(extra), tuple(labels) + ("aux",))
    return g, cut, share * len(nudges)


def witness_ratio_bound(f: StepFunction, g: WeightedDigraph, cut) -> Fraction:
    """Expected cut weight over the weight of the given cut; an upper bound
    on the ratio of f on g since that cut is at most optimal."""
    return expected_cut_weight(g, f) / cut_weight(g, cut)


# --- one-call front end ----------------------------------------------------


@dataclass
class RatioCertificate:
    function: StepFunction = field(repr=False)
    fingerprint: str
    lp_value: Fraction
    lower: Fraction
    upper: Fraction
    witness: WeightedDigraph = field(repr=False)
    witness_cut: frozenset = field(repr=False)
    epsilon: Fraction
    dual: list = field(repr=False)
    iterations: int = 0
    seconds: float = 0.0

    @property
    def certified_interval(self):
        return self.lower, self.upper

    def witness_ratio(self) -> Fraction:
        return witness_ratio_bound(self.function, self.witness, self.witness_cut)


def approximation_ratio(
    f: StepFunction,
    sym_reduce: bool = False,
    tol: float = DEFAULT_TOL,
    time_limit: float | None = None,
    rule: str = "dantzig",
    epsilon_fraction=DEFAULT_EPSILON_FRACTION,
) -> RatioCertificate:
    """Certified worst-case approximation ratio of the oblivious algorithm f."""
    start = time.monotonic()
    model = build_lp(f, sym_reduce=sym_reduce)
    sol = solve(model, tol=tol, time_limit=time_limit, rule=rule)
    check_status(sol)
    cert = certify(model, sol)
    witness, cut, eps = extract_witness(model, cert.primal, epsilon_fraction)
    log.info("ratio of %s in [%s, %s] (%d pivots)", f.fingerprint(), cert.lower, cert.upper, sol.iterations)
    return RatioCertificate(
        function=f,
        fingerprint=f.fingerprint(),
        lp_value=cert.upper,
        lower=cert.lower,
        upper=cert.upper,
        witness=witness,
        witness_cut=cut,
        epsilon=eps,
        dual=cert.dual,
        iterations=sol.iterations,
        seconds=time.monotonic() - start,
    )


# --- certificate file ------------------------------------------------------

CERT_HEADER = "ratio-cert v1"


def format_certificate(cert: RatioCertificate) -> str:
    lines = [
        CERT_HEADER,
        f"function {cert.fingerprint}",
        f"lower {format_fraction(cert.lower)}",
        f"upper {format_fraction(cert.upper)}",
        f"epsilon {format_fraction(cert.epsilon)}",
        "cut " + " ".join(str(v) for v in sorted(cert.witness_cut)),
        f"dual {len(cert.dual)}",
    ]
    lines.extend(format_fraction(y) for y in cert.dual)
    lines.append("witness")
    lines.append(format_graph(cert.witness).rstrip("\n"))
    return "\n".join(lines) + "\n"


@dataclass
class ParsedCertificate:
    fingerprint: str
    lower: Fraction
    upper: Fraction
    epsilon: Fraction
    cut: frozenset
    dual: list
    witness: WeightedDigraph


def parse_certificate(text: str, source: str | None = None) -> ParsedCertificate:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CERT_HEADER:
        raise ParseError(f"expected header '{CERT_HEADER}'", 1, 1, source)
    fields = {}
    k = 1
    try:
        while k < len(lines):
            key, _, rest = lines[k].partition(" ")
            if key == "dual":
                count = int(rest)
                fields["dual"] = [parse_number(s) for s in lines[k + 1: k + 1 + count]]
                if len(fields["dual"]) != count:
                    raise ParseError("truncated dual vector", k + 1, 1, source)
                k += count + 1
                continue
            if key == "witness":
                witness = parse_graph("\n".join(lines[k + 1:]), source)
                break
            fields[key] = rest.strip()
            k += 1
        else:
            raise ParseError("missing witness section", None, None, source)
        return ParsedCertificate(
            fingerprint=fields["function"],
            lower=parse_number(fields["lower"]),
            upper=parse_number(fields["upper"]),
            epsilon=parse_number(fields["epsilon"]),
            cut=frozenset(int(t) for t in fields["cut"].split()),
            dual=fields["dual"],
            witness=witness,
        )
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}", None, None, source)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), k + 1, 1, source)


def verify_certificate(text: str, f: StepFunction, slack=10) -> tuple:
    """Independently re-check a certificate file against f.

    The dual vector must be exactly feasible for f's LP with objective equal
    to the stated lower bound, and the witness must reach a ratio of at most
    ``upper + slack * epsilon``. Returns ``(lower, upper)``.
    """
    cert = parse_certificate(text)
    if cert.fingerprint != f.fingerprint():
        raise CertificateInvalid("certificate was issued for a different function")
    if cert.lower > cert.upper:
        raise CertificateInvalid("lower bound exceeds upper bound")
    model = build_lp(f)
    lower = check_dual(model.program, cert.dual)
    if lower != cert.lower:
        raise CertificateInvalid(f"dual objective {lower} differs from stated lower bound {cert.lower}")
    ratio = witness_ratio_bound(f, cert.witness, cert.cut)
    if ratio > cert.upper + slack * cert.epsilon:
        raise CertificateInvalid(f"witness ratio {ratio} exceeds stated upper bound")
    return cert.lower, cert.upper
