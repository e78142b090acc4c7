"""Revised primal simplex with exact rational re-verification.

The float solver finds a basis; :func:`exact_basic_solution` then rebuilds
the primal and dual solutions of that basis in rational arithmetic so that
callers can check optimality without trusting floating point.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.linalg import blas, lu_factor, lu_solve

from .errors import IterationLimit, SingularBasis, SolverError

log = logging.getLogger(__name__)

__all__ = [
    "Row",
    "LinearProgram",
    "StandardForm",
    "SimplexResult",
    "simplex",
    "solve_exact",
    "exact_basic_solution",
]

LE, GE, EQ = "<=", ">=", "="
# entries below this are treated as round-off when pivoting
_ZERO = 1e-12


@dataclass(frozen=True)
class Row:
    coeffs: dict  # variable index -> Fraction
    sense: str
    rhs: Fraction = Fraction(0)


@dataclass
class LinearProgram:
    """min c.x subject to ``rows`` and x >= 0."""

    objective: list
    rows: list

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass
class StandardForm:
    """min c.x s.t. A x = b, x >= 0, b >= 0, with slack and artificial columns.

    Columns are ``[structural | slack/surplus | artificial]``. ``row_sign[r]``
    is -1 when row r was negated to make its right-hand side nonnegative.
    """

    columns: list  # list of dict row -> Fraction
    cost: list
    rhs: list
    num_structural: int
    num_slack: int
    artificial_rows: list
    row_sign: list
    initial_basis: list

    @property
    def num_rows(self) -> int:
        return len(self.rhs)

    @property
    def num_columns(self) -> int:
        return len(self.columns)

    def is_artificial(self, j: int) -> bool:
        return j >= self.num_structural + self.num_slack


def to_standard_form(lp: LinearProgram) -> StandardForm:
    m = len(lp.rows)
    n = lp.num_vars
    columns = [dict() for _ in range(n)]
    rhs = []
    row_sign = []
    slack_cols = []
    basis = [None] * m
    artificial_rows = []
    for r, row in enumerate(lp.rows):
        b = Fraction(row.rhs)
        sense = row.sense
        sign = 1
        if sense == GE and b <= 0:
            # -row <= -b with -b >= 0: a slack gives a feasible start
            sign, sense = -1, LE
        elif b < 0:
            sign = -1
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        for j, a in row.coeffs.items():
            if a:
                columns[j][r] = sign * Fraction(a)
        rhs.append(sign * b)
        row_sign.append(sign)
        if sense == LE:
            basis[r] = n + len(slack_cols)
            slack_cols.append({r: Fraction(1)})
        else:
            if sense == GE:
                slack_cols.append({r: Fraction(-1)})
            artificial_rows.append(r)
    num_slack = len(slack_cols)
    columns.extend(slack_cols)
    for r in artificial_rows:
        basis[r] = len(columns)
        columns.append({r: Fraction(1)})
    cost = [Fraction(c) for c in lp.objective] + [Fraction(0)] * (len(columns) - n)
    return StandardForm(columns, cost, rhs, n, num_slack, artificial_rows, row_sign, basis)


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded" | "iteration-limit"
    basis: list
    x: np.ndarray  # values of all standard-form columns
    objective: float
    iterations: int
    form: StandardForm = field(repr=False)


class _Revised:
    """Revised simplex state: sparse A, explicit dense basis inverse.

    The inverse gets a rank-one update per pivot and is rebuilt from A every
    ``refactor_every`` pivots, which keeps round-off from piling up.
    """

    def __init__(self, sf: StandardForm):
        self.sf = sf
        m, N = sf.num_rows, sf.num_columns
        self.m, self.N = m, N
        rows, cols, vals = [], [], []
        for j, col in enumerate(sf.columns):
            for r, a in col.items():
                rows.append(r)
                cols.append(j)
                vals.append(float(a))
        self.A = sparse.csc_matrix((vals, (rows, cols)), shape=(m, N))
        self.AT = self.A.T.tocsr()
        self.b = np.array([float(x) for x in sf.rhs])
        self.c = np.array([float(x) for x in sf.cost])
        self.c1 = np.zeros(N)
        self.c1[sf.num_structural + sf.num_slack:] = 1.0
        self.basis = list(sf.initial_basis)
        self.refactor()

    def refactor(self):
        B = self.A[:, self.basis].toarray()
        try:
            lu = lu_factor(B, check_finite=False)
        except Exception as exc:  # pragma: no cover - scipy raises LinAlgError
            raise SingularBasis(str(exc))
        diag = np.abs(np.diag(lu[0]))
        if diag.size and diag.min() < 1e-11 * max(1.0, diag.max()):
            raise SingularBasis("basis matrix is numerically singular")
        self.Binv = np.ascontiguousarray(lu_solve(lu, np.eye(self.m), check_finite=False))
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < _ZERO] = 0.0

    def column(self, q: int) -> np.ndarray:
        a = self.A
        lo, hi = a.indptr[q], a.indptr[q + 1]
        return self.Binv[:, a.indices[lo:hi]] @ a.data[lo:hi]

    def reduced_costs(self, cost: np.ndarray, allowed: int) -> np.ndarray:
        y = cost[self.basis] @ self.Binv
        return cost[:allowed] - (self.AT[:allowed] @ y)

    def tableau_row(self, r: int, allowed: int) -> np.ndarray:
        return self.AT[:allowed] @ self.Binv[r]

    def pivot(self, r: int, q: int, alpha: np.ndarray):
        theta = self.xB[r] / alpha[r]
        self.xB -= theta * alpha
        self.xB[r] = theta
        self.xB[np.abs(self.xB) < _ZERO] = 0.0
        prow = self.Binv[r] / alpha[r]
        col = alpha.copy()
        col[r] = 0.0
        # Binv <- Binv - col * prow^T, in place through the Fortran view
        blas.dger(-1.0, prow, col, a=self.Binv.T, overwrite_a=1)
        self.Binv[r] = prow
        self.basis[r] = q


def simplex(
    sf: StandardForm,
    tol: float = 1e-9,
    max_iter: int = 200000,
    time_limit: float | None = None,
    rule: str = "dantzig",
    refactor_every: int = 100,
    pivot_tol: float = 1e-7,
) -> SimplexResult:
    """Two-phase revised primal simplex.

    ``rule="bland"`` enters the lowest-index improving column;
    ``rule="dantzig"`` enters the most negative reduced cost but falls back to
    Bland's rule while pivots are degenerate, which keeps the anti-cycling
    guarantee. Leaving rows are chosen by minimum ratio with ties broken by
    the smallest basic column index.
    """
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    tab = _Revised(sf)
    m, N = tab.m, tab.N
    start = time.monotonic()
    iterations = 0
    first_art = sf.num_structural + sf.num_slack

    def run_phase(cost: np.ndarray, allowed: int) -> str:
        nonlocal iterations
        degenerate_run = 0
        since_refactor = 0
        while True:
            if iterations >= max_iter:
                return "iteration-limit"
            if time_limit is not None and time.monotonic() - start > time_limit:
                return "iteration-limit"
            d = tab.reduced_costs(cost, allowed)
            if rule == "dantzig" and degenerate_run < 50:
                q = int(np.argmin(d))
                if d[q] >= -tol:
                    q = -1
            else:
                neg = np.flatnonzero(d < -tol)
                q = int(neg[0]) if neg.size else -1
            if q < 0:
                if since_refactor:
                    tab.refactor()
                    since_refactor = 0
                    continue
                return "optimal"
            alpha = tab.column(q)
            rows = np.flatnonzero(alpha > pivot_tol)
            if rows.size == 0:
                return "unbounded"
            ratios = tab.xB[rows] / alpha[rows]
            best = ratios.min()
            tied = rows[ratios <= best + tol * max(1.0, abs(best))]
            r = min(tied, key=lambda i: tab.basis[i])
            degenerate_run = degenerate_run + 1 if tab.xB[r] <= tol else 0
            tab.pivot(r, q, alpha)
            iterations += 1
            since_refactor += 1
            if since_refactor >= refactor_every:
                tab.refactor()
                since_refactor = 0

    status = "optimal"
    if sf.artificial_rows:
        status = run_phase(tab.c1, N)
        if status == "optimal" and tab.c1[tab.basis] @ tab.xB > tol * 10:
            status = "infeasible"
        if status == "optimal":
            _drive_out_artificials(tab, first_art, tol)
    if status == "optimal":
        status = run_phase(tab.c, first_art)
    x = np.zeros(N)
    x[tab.basis] = tab.xB
    obj = float(tab.c @ x)
    log.debug("simplex %s after %d iterations, objective %.12g", status, iterations, obj)
    return SimplexResult(status, list(tab.basis), x, obj, iterations, sf)


def _drive_out_artificials(tab: _Revised, first_art: int, tol: float):
    changed = False
    for r in range(tab.m):
        if tab.basis[r] >= first_art:
            row = tab.tableau_row(r, first_art)
            cand = np.flatnonzero(np.abs(row) > 1e-7)
            if cand.size:
                q = int(cand[np.argmax(np.abs(row[cand]))])
                tab.pivot(r, q, tab.column(q))
                changed = True
            # otherwise the row is redundant and the artificial stays at zero
    if changed:
        tab.refactor()


# --- exact arithmetic ------------------------------------------------------


def solve_exact(equations: list, rhs: list, num_unknowns: int) -> list:
    """Solve a square sparse rational system exactly.

    ``equations[k]`` maps unknown index -> coefficient. Pivots follow a
    Markowitz-style order (sparsest equation, then rarest unknown).
    Raises :class:`SingularBasis` if the system is singular.
    """
    if len(equations) != num_unknowns:
        raise SingularBasis("system is not square")
    eqs = [dict(e) for e in equations]
    b = [Fraction(x) for x in rhs]
    occurs = [set() for _ in range(num_unknowns)]
    for k, e in enumerate(eqs):
        for j in list(e):
            if e[j] == 0:
                del e[j]
            else:
                occurs[j].add(k)
    active = set(range(len(eqs)))
    order = []
    while active:
        k = min(active, key=lambda i: (len(eqs[i]), i))
        e = eqs[k]
        if not e:
            raise SingularBasis("basis matrix is singular")
        j = min(e, key=lambda u: (len(occurs[u]), u))
        active.discard(k)
        piv = e[j]
        for k2 in list(occurs[j]):
            if k2 == k or k2 not in active:
                continue
            e2 = eqs[k2]
            factor = e2[j] / piv
            for u, a in e.items():
                val = e2.get(u, 0) - factor * a
                if val:
                    if u not in e2:
                        occurs[u].add(k2)
                    e2[u] = val
                elif u in e2:
                    del e2[u]
                    occurs[u].discard(k2)
            b[k2] -= factor * b[k]
        for u in e:
            occurs[u].discard(k)
        order.append((k, j))
    x = [Fraction(0)] * num_unknowns
    for k, j in reversed(order):
        e = eqs[k]
        s = b[k]
        for u, a in e.items():
            if u != j:
                s -= a * x[u]
        x[j] = s / e[j]
    return x


def exact_basic_solution(sf: StandardForm, basis: list):
    """Exact primal values (all columns) and row duals for a basis.

    Duals are for the standard-form rows; multiply by ``sf.row_sign`` to get
    duals of the original rows.
    """
    m = sf.num_rows
    if len(basis) != m or len(set(basis)) != m:
        raise SingularBasis("basis must list m distinct columns")
    # B x_B = b: one equation per row
    row_eqs = [dict() for _ in range(m)]
    for k, j in enumerate(basis):
        for r, a in sf.columns[j].items():
            row_eqs[r][k] = a
    xb = solve_exact(row_eqs, sf.rhs, m)
    # B^T y = c_B: one equation per basic column
    col_eqs = [dict(sf.columns[j]) for j in basis]
    y = solve_exact(col_eqs, [sf.cost[j] for j in basis], m)
    x = [Fraction(0)] * sf.num_columns
    for k, j in enumerate(basis):
        x[j] = xb[k]
    return x, y


def reduced_costs(sf: StandardForm, y: list) -> list:
    out = []
    for j, col in enumerate(sf.columns):
        s = sf.cost[j]
        for r, a in col.items():
            s -= a * y[r]
        out.append(s)
    return out


def check_status(result: SimplexResult) -> None:
    if result.status == "iteration-limit":
        raise IterationLimit(f"simplex stopped after {result.iterations} iterations")
    if result.status != "optimal":
        raise SolverError(f"linear program is {result.status}")
