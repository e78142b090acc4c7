"""Search for good antisymmetric step functions.

``exhaustive_best`` scores every member of the discretized family by its
certified lower bound. ``local_refine`` is a heuristic coordinate ascent on
interval values and makes no optimality claim.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, TextIO

from .errors import LimitExceeded
from .ratio_lp import RatioCertificate, approximation_ratio
from .rational import format_fraction
from .selection import (
    DEFAULT_FAMILY_LIMIT,
    StepFunction,
    antisymmetric_from_lower,
    enumerate_family,
    is_antisymmetric,
)

log = logging.getLogger(__name__)

__all__ = ["exhaustive_best", "local_refine", "ledger_line"]

HALF = Fraction(1, 2)


def ledger_line(cert: RatioCertificate) -> str:
    return f"{cert.fingerprint} {format_fraction(cert.lower)} {format_fraction(cert.upper)}"


def _score(f: StepFunction) -> RatioCertificate:
    return approximation_ratio(f)


def _certify_all(functions: list, jobs: int) -> Iterable[RatioCertificate]:
    if jobs <= 1 or len(functions) < 2:
        return map(_score, functions)
    pool = ProcessPoolExecutor(max_workers=jobs)
    # map preserves input order, so the reduction below stays deterministic
    results = list(pool.map(_score, functions, chunksize=max(1, len(functions) // (4 * jobs))))
    pool.shutdown()
    return results


def _better(cert: RatioCertificate, best: RatioCertificate | None) -> bool:
    if best is None or cert.lower > best.lower:
        return True
    if cert.lower < best.lower:
        return False
    return cert.function.interval_values < best.function.interval_values


def exhaustive_best(
    n: int,
    jobs: int = 1,
    ledger: TextIO | None = None,
    limit: int = DEFAULT_FAMILY_LIMIT,
) -> tuple:
    """Best member of the (n+1)^n antisymmetric family by certified lower bound.

    Ties go to the lexicographically smallest interval values. Returns
    ``(function, certificate)``; with ``ledger`` every candidate is written as
    one ``<hash> <lower> <upper>`` line in enumeration order.
    """
    if n > limit:
        raise LimitExceeded(f"exhaustive search limited to n <= {limit}")
    functions = list(enumerate_family(n, limit=limit))
    best = None
    for cert in _certify_all(functions, jobs):
        if ledger is not None:
            ledger.write(ledger_line(cert) + "\n")
        if _better(cert, best):
            best = cert
    return best.function, best


def _lower_coordinates(f: StepFunction):
    """Interior breakpoints below 1/2 and the values on the intervals below 1/2."""
    bps = [z for z in f.breakpoints if 0 < z < HALF]
    edges = [Fraction(0)] + bps + [HALF]
    values = [f((a + b) / 2) for a, b in zip(edges, edges[1:])]
    return bps, values


def local_refine(
    f0: StepFunction,
    grid: int,
    rounds: int = 1,
    history: list | None = None,
    scorer: Callable[[StepFunction], RatioCertificate] = _score,
) -> tuple:
    """Antisymmetric coordinate ascent on the values below 1/2.

    Each coordinate tries every value k/grid in increasing k and takes the best
    strictly improving one; the mirror interval follows automatically. f0 keeps
    its breakpoints (1/2 is added if missing). Returns ``(function,
    certificate)``; ``history`` receives the incumbent value after each round.
    """
    if grid < 1:
        raise ValueError("grid must be positive")
    if not is_antisymmetric(f0):
        raise ValueError("local_refine needs an antisymmetric start")
    best_f = f0
    best = scorer(f0)
    bps, values = _lower_coordinates(f0)
    lattice = [Fraction(k, grid) for k in range(grid + 1)]
    for rnd in range(rounds):
        improved = False
        for i in range(len(values)):
            for v in lattice:
                if v == values[i]:
                    continue
                trial = values[:i] + [v] + values[i + 1:]
                f = antisymmetric_from_lower(bps, trial)
                cert = scorer(f)
                if cert.lower > best.lower:
                    best, best_f, values = cert, f, trial
                    improved = True
        log.info("refine round %d: %s", rnd + 1, best.lower)
        if history is not None:
            history.append(best.lower)
        if not improved:
            break
    return best_f, best
