"""Exact number parsing and printing helpers."""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from numbers import Rational

__all__ = ["to_fraction", "parse_number", "format_fraction", "format_decimal", "format_exact"]


def to_fraction(x) -> Fraction:
    """Convert ints, Fractions, decimal strings and ``p/q`` strings exactly.

    Floats are converted through their shortest ``repr`` so that ``0.1``
    becomes ``1/10`` rather than the binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError(f"not a finite number: {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return parse_number(x)
    # numpy scalars and anything else with a float view
    return to_fraction(float(x))


def parse_number(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty number")
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a decimal or p/q rational: {text!r}") from exc
    return value


def format_fraction(x: Fraction) -> str:
    """``p/q`` (or ``p`` for integers); round-trips through :func:`parse_number`."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _terminating_places(q: int):
    twos = fives = 0
    while q % 2 == 0:
        q //= 2
        twos += 1
    while q % 5 == 0:
        q //= 5
        fives += 1
    return max(twos, fives) if q == 1 else None


def format_decimal(x: Fraction, digits: int = 10) -> str:
    """Shortest exact decimal when it has at most ``digits`` places,
    otherwise rounded to ``digits`` places."""
    x = Fraction(x)
    places = _terminating_places(x.denominator)
    if places is not None and places <= digits:
        with localcontext() as ctx:
            ctx.prec = len(str(abs(x.numerator))) + places + 2
            d = Decimal(x.numerator) / Decimal(x.denominator)
        text = format(d, "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        return text
    return f"{float(x):.{digits}f}"


def format_exact(x: Fraction, digits: int = 10) -> str:
    """Exact rational followed by a decimal rendering, e.g. ``3/8 (0.3750000000)``."""
    x = Fraction(x)
    return f"{format_fraction(x)} ({float(x):.{digits}f})"
