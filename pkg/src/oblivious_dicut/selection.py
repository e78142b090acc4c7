"""Step selection functions mapping a bias in [0, 1] to a selection probability."""

from __future__ import annotations

import bisect
import hashlib
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .errors import LimitExceeded, ParseError
from .rational import format_fraction, parse_number, to_fraction

__all__ = [
    "StepFunction",
    "evaluate",
    "is_antisymmetric",
    "antisymmetrize",
    "advantage",
    "make_uniform",
    "make_f_delta",
    "make_paper_0483",
    "make_clamped_linear_discretized",
    "make_greedy_threshold",
    "antisymmetric_from_lower",
    "enumerate_family",
    "family_size",
    "parse_stepfn",
    "format_stepfn",
    "read_stepfn",
    "named_function",
]

ZERO, HALF, ONE = Fraction(0), Fraction(1, 2), Fraction(1)
DEFAULT_FAMILY_LIMIT = 5


@dataclass(frozen=True)
class StepFunction:
    """Piecewise constant f: [0, 1] -> [0, 1].

    ``breakpoints`` runs from 0 to 1 inclusive; ``interval_values[i]`` is the
    value on the open interval ``(breakpoints[i], breakpoints[i+1])`` and
    ``point_values[i]`` the value at ``breakpoints[i]``.
    """

    breakpoints: tuple
    interval_values: tuple
    point_values: tuple

    def __post_init__(self):
        bps = tuple(to_fraction(z) for z in self.breakpoints)
        vals = tuple(to_fraction(v) for v in self.interval_values)
        pts = tuple(to_fraction(v) for v in self.point_values)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(vals) != len(bps) - 1:
            raise ValueError("need one value per open interval")
        if len(pts) != len(bps):
            raise ValueError("need one point value per breakpoint")
        for v in vals + pts:
            if not 0 <= v <= 1:
                raise ValueError(f"value {v} outside [0, 1]")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "interval_values", vals)
        object.__setattr__(self, "point_values", pts)

    @classmethod
    def from_intervals(cls, breakpoints: Sequence, values: Sequence, points: Mapping | None = None):
        """Build from interval values; unspecified point values take the
        right limit (left limit at x = 1)."""
        bps = [to_fraction(z) for z in breakpoints]
        vals = [to_fraction(v) for v in values]
        if len(vals) != len(bps) - 1:
            raise ValueError("need one value per open interval")
        pts = vals + [vals[-1]]
        for z, v in (points or {}).items():
            z = to_fraction(z)
            try:
                pts[bps.index(z)] = to_fraction(v)
            except ValueError:
                raise ValueError(f"point value given at {z}, which is not a breakpoint")
        return cls(tuple(bps), tuple(vals), tuple(pts))

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    @property
    def intervals(self):
        """``(lo, hi, value)`` for each open interval."""
        b = self.breakpoints
        return [(b[i], b[i + 1], v) for i, v in enumerate(self.interval_values)]

    def default_point(self, i: int) -> Fraction:
        if i == len(self.breakpoints) - 1:
            return self.interval_values[-1]
        return self.interval_values[i]

    def explicit_points(self) -> dict:
        """Point values that differ from the right-limit default."""
        return {
            self.breakpoints[i]: v
            for i, v in enumerate(self.point_values)
            if v != self.default_point(i)
        }

    def canonical(self) -> "StepFunction":
        """Drop interior breakpoints where f is continuous."""
        b, vals, pts = self.breakpoints, self.interval_values, self.point_values
        keep = [0]
        for i in range(1, len(b) - 1):
            if not vals[i - 1] == vals[i] == pts[i]:
                keep.append(i)
        keep.append(len(b) - 1)
        return StepFunction(
            tuple(b[i] for i in keep),
            tuple(vals[i] for i in keep[:-1]),
            tuple(pts[i] for i in keep),
        )

    def refine(self, extra: Sequence) -> "StepFunction":
        """Same function over a superset of breakpoints."""
        bps = sorted(set(self.breakpoints) | {to_fraction(z) for z in extra if 0 <= to_fraction(z) <= 1})
        vals = [evaluate(self, (a + b) / 2) for a, b in zip(bps, bps[1:])]
        pts = [evaluate(self, z) for z in bps]
        return StepFunction(tuple(bps), tuple(vals), tuple(pts))

    def fingerprint(self) -> str:
        """Short hash of the canonical text form."""
        text = format_stepfn(self.canonical())
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def evaluate(f: StepFunction, x) -> Fraction:
    x = to_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"bias {x} outside [0, 1]")
    i = bisect.bisect_left(f.breakpoints, x)
    if i < len(f.breakpoints) and f.breakpoints[i] == x:
        return f.point_values[i]
    return f.interval_values[i - 1]


def _mirror_refinement(f: StepFunction) -> StepFunction:
    return f.refine([1 - z for z in f.breakpoints])


def is_antisymmetric(f: StepFunction, tol=0) -> bool:
    """True iff f(x) + f(1-x) = 1 everywhere (within ``tol``)."""
    tol = to_fraction(tol)
    g = _mirror_refinement(f)
    b = g.breakpoints
    for z, v in zip(b, g.point_values):
        if abs(v + evaluate(g, 1 - z) - 1) > tol:
            return False
    for lo, hi, v in g.intervals:
        if abs(v + evaluate(g, 1 - (lo + hi) / 2) - 1) > tol:
            return False
    return True


def antisymmetrize(f: StepFunction) -> StepFunction:
    """g(x) = (f(x) + 1 - f(1-x)) / 2, which is always antisymmetric."""
    r = _mirror_refinement(f)
    vals = [(v + 1 - evaluate(r, 1 - (lo + hi) / 2)) / 2 for lo, hi, v in r.intervals]
    pts = [(v + 1 - evaluate(r, 1 - z)) / 2 for z, v in zip(r.breakpoints, r.point_values)]
    return StepFunction(r.breakpoints, tuple(vals), tuple(pts))


def advantage(f, x, y) -> Fraction:
    """Gain of antisymmetrize(f) over f on an edge with endpoint biases x, y
    together with its reversed copy (biases 1-y, 1-x)."""
    x, y = to_fraction(x), to_fraction(y)
    return (1 - f(x) - f(1 - x)) * (1 - f(y) - f(1 - y)) / 2


# --- named functions -------------------------------------------------------


def make_uniform() -> StepFunction:
    return StepFunction((ZERO, ONE), (HALF,), (HALF, HALF))


def make_f_delta(delta) -> StepFunction:
    """0 below delta, 1/2 on [delta, 1-delta], 1 above 1-delta."""
    d = to_fraction(delta)
    if not 0 < d < HALF:
        raise ValueError(f"delta must lie in (0, 1/2), got {d}")
    return StepFunction(
        (ZERO, d, 1 - d, ONE),
        (ZERO, HALF, ONE),
        (ZERO, HALF, HALF, ONE),
    )


def make_greedy_threshold() -> StepFunction:
    """Select iff bias >= 1/2 (ties go to the selected side)."""
    return StepFunction((ZERO, HALF, ONE), (ZERO, ONE), (ZERO, ONE, ONE))


def antisymmetric_from_lower(lower_breakpoints: Sequence, lower_values: Sequence, middle=HALF) -> StepFunction:
    """Antisymmetric function from its restriction to [0, 1/2).

    ``lower_breakpoints`` are the interior breakpoints strictly inside
    (0, 1/2); 1/2 itself is always a breakpoint carrying ``middle``
    (which must be 1/2 for exact antisymmetry). Point values are right
    limits below 1/2 and left limits above it.
    """
    low = [ZERO] + [to_fraction(z) for z in lower_breakpoints]
    vals = [to_fraction(v) for v in lower_values]
    if len(vals) != len(low):
        raise ValueError("need one value per lower interval")
    if any(not ZERO < z < HALF for z in low[1:]):
        raise ValueError("lower breakpoints must lie strictly inside (0, 1/2)")
    bps = low + [HALF] + [1 - z for z in reversed(low)]
    all_vals = vals + [1 - v for v in reversed(vals)]
    pts = vals + [to_fraction(middle)] + [1 - v for v in reversed(vals)]
    return StepFunction(tuple(bps), tuple(all_vals), tuple(pts))


def _clamped_linear(x: Fraction) -> Fraction:
    return min(ONE, max(ZERO, 2 * (x - HALF) + HALF))


def make_clamped_linear_discretized(steps: int = 100) -> StepFunction:
    """Discretise max(0, min(1, 2x - 1/2)) into ``steps`` equal steps over [1/4, 3/4].

    Each step carries the value at its midpoint; 0 below 1/4 and 1 above 3/4.
    When 1/2 is a breakpoint it gets the isolated value 1/2.
    """
    steps = int(steps)
    if steps < 1:
        raise ValueError("steps must be positive")
    width = HALF / steps
    inner = [Fraction(1, 4) + k * width for k in range(steps + 1)]
    bps = [ZERO] + inner + [ONE]
    vals = [ZERO] + [_clamped_linear((a + b) / 2) for a, b in zip(inner, inner[1:])] + [ONE]
    pts = []
    for i, z in enumerate(bps):
        if z == HALF:
            pts.append(HALF)
        elif z < HALF:
            pts.append(vals[i])
        else:
            pts.append(vals[i - 1])
    return StepFunction(tuple(bps), tuple(vals), tuple(pts))


def make_paper_0483() -> StepFunction:
    """The 100-step function: 0 below 1/4, 1 above 3/4, value 0.005+0.01i on
    the i-th step of width 0.005 in between, and 1/2 at x = 1/2."""
    return make_clamped_linear_discretized(100)


def family_size(n: int) -> int:
    return (n + 1) ** n


def enumerate_family(n: int, limit: int = DEFAULT_FAMILY_LIMIT) -> Iterator[StepFunction]:
    """All antisymmetric functions constant on the 2n intervals of width 1/(2n)
    with values in {0, 1/n, ..., 1}; f(1/2) = 1/2.

    The lower n interval values are free, so there are (n+1)^n members,
    yielded in lexicographic order of those values.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > limit:
        raise LimitExceeded(f"family size limited to n <= {limit}")
    lower = [Fraction(k, 2 * n) for k in range(1, n)]
    for ks in itertools.product(range(n + 1), repeat=n):
        yield antisymmetric_from_lower(lower, [Fraction(k, n) for k in ks])


# --- text format -----------------------------------------------------------

STEPFN_HEADER = "stepfn"


def format_stepfn(f: StepFunction) -> str:
    lines = [f"{STEPFN_HEADER} v1"]
    for lo, hi, v in f.intervals:
        lines.append(f"{format_fraction(lo)} {format_fraction(hi)} {format_fraction(v)}")
    for z, v in sorted(f.explicit_points().items()):
        lines.append(f"@ {format_fraction(z)} {format_fraction(v)}")
    return "\n".join(lines) + "\n"


def parse_stepfn(text: str, source: str | None = None) -> StepFunction:
    header_seen = False
    intervals = []
    points = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        cols = []
        pos = 0
        for t in tokens:
            pos = raw.index(t, pos)
            cols.append(pos + 1)
            pos += len(t)
        if not header_seen:
            if tokens != [STEPFN_HEADER, "v1"]:
                raise ParseError("expected header 'stepfn v1'", lineno, cols[0], source)
            header_seen = True
            continue

        def num(k):
            try:
                return parse_number(tokens[k])
            except ValueError as exc:
                raise ParseError(str(exc), lineno, cols[k], source)

        if tokens[0] == "@":
            if len(tokens) != 3:
                raise ParseError("expected '@ <z> <value>'", lineno, cols[0], source)
            z, v = num(1), num(2)
            if z in points:
                raise ParseError(f"duplicate point value at {z}", lineno, cols[1], source)
            points[z] = (v, lineno, cols[1])
            continue
        if len(tokens) != 3:
            raise ParseError("expected '<lo> <hi> <value>'", lineno, cols[0], source)
        lo, hi, v = num(0), num(1), num(2)
        if not 0 <= v <= 1:
            raise ParseError("value outside [0, 1]", lineno, cols[2], source)
        expected_lo = intervals[-1][1] if intervals else ZERO
        if lo != expected_lo:
            raise ParseError(f"interval must start at {format_fraction(expected_lo)}", lineno, cols[0], source)
        if hi <= lo:
            raise ParseError("interval must have positive width", lineno, cols[1], source)
        intervals.append((lo, hi, v))
    if not header_seen:
        raise ParseError("missing 'stepfn v1' header", None, None, source)
    if not intervals or intervals[-1][1] != ONE:
        raise ParseError("intervals must cover (0, 1)", None, None, source)
    bps = [ZERO] + [hi for _, hi, _ in intervals]
    for z, (v, lineno, col) in points.items():
        if z not in bps:
            raise ParseError(f"{format_fraction(z)} is not a breakpoint", lineno, col, source)
        if not 0 <= v <= 1:
            raise ParseError("value outside [0, 1]", lineno, col, source)
    return StepFunction.from_intervals(bps, [v for _, _, v in intervals], {z: v for z, (v, _, _) in points.items()})


def read_stepfn(path) -> StepFunction:
    with open(path) as fh:
        return parse_stepfn(fh.read(), source=str(path))


def named_function(spec: str) -> StepFunction:
    """Resolve ``uniform``, ``greedy-threshold``, ``f-delta:<d>``,
    ``paper-0483`` or ``clamped-linear:<k>``."""
    name, _, arg = spec.partition(":")
    if name == "uniform" and not arg:
        return make_uniform()
    if name == "greedy-threshold" and not arg:
        return make_greedy_threshold()
    if name == "paper-0483" and not arg:
        return make_paper_0483()
    if name == "f-delta" and arg:
        return make_f_delta(parse_number(arg))
    if name == "clamped-linear" and arg:
        return make_clamped_linear_discretized(int(arg))
    raise KeyError(spec)
