"""Exact-rational-first numeric tower.

Exact numbers are `fractions.Fraction` values (arbitrary-precision, always
in lowest terms with positive denominator); inexact numbers are Python
floats.  Any operation with an inexact operand is contagious and yields an
inexact result; operations on exact operands stay exact.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import EvalError

Number = Fraction | int | float

_INT_RE = re.compile(r"[+-]?\d+")
_FRAC_RE = re.compile(r"[+-]?\d+/\d+")
_DEC_RE = re.compile(r"[+-]?\d+\.\d+")


def is_number(v: object) -> bool:
    # bool is an int subclass; booleans are not numbers in this language
    return isinstance(v, (Fraction, float)) or (isinstance(v, int) and not isinstance(v, bool))


def is_exact(v: Number) -> bool:
    return not isinstance(v, float)


def is_number_literal(text: str) -> bool:
    return bool(_INT_RE.fullmatch(text) or _FRAC_RE.fullmatch(text) or _DEC_RE.fullmatch(text))


def parse_number(text: str) -> Fraction:
    """Parse an integer, `p/q` fraction or decimal literal as an exact rational.

    Decimal literals denote exact values: 1.5 reads as 3/2.
    """
    if _FRAC_RE.fullmatch(text):
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"fraction literal {text} has a zero denominator")
        return Fraction(int(num), int(den))
    if _INT_RE.fullmatch(text) or _DEC_RE.fullmatch(text):
        return Fraction(text)
    raise ValueError(f"not a number literal: {text}")


def _check(v: Number, op: str) -> None:
    if not is_number(v):
        raise EvalError(f"{op}: expected a number, given {v!r}")


def add(a: Number, b: Number) -> Number:
    _check(a, "+"), _check(b, "+")
    return a + b


def sub(a: Number, b: Number) -> Number:
    _check(a, "-"), _check(b, "-")
    return a - b


def mul(a: Number, b: Number) -> Number:
    _check(a, "*"), _check(b, "*")
    return a * b


def div(a: Number, b: Number) -> Number:
    _check(a, "/"), _check(b, "/")
    if b == 0:
        raise EvalError("division by zero")
    return a / b


def sqr(a: Number) -> Number:
    _check(a, "sqr")
    return a * a


def add1(a: Number) -> Number:
    _check(a, "add1")
    return a + 1


def sub1(a: Number) -> Number:
    _check(a, "sub1")
    return a - 1


def is_zero(a: Number) -> bool:
    _check(a, "zero?")
    return a == 0


def sqrt(a: Number) -> Number:
    """Square root; exact when the argument is the square of a rational."""
    _check(a, "sqrt")
    if a < 0:
        raise EvalError("sqrt: expected a non-negative number")
    if isinstance(a, float):
        return math.sqrt(a)
    f = Fraction(a)
    num_root = math.isqrt(f.numerator)
    den_root = math.isqrt(f.denominator)
    if num_root * num_root == f.numerator and den_root * den_root == f.denominator:
        return Fraction(num_root, den_root)
    return math.sqrt(f.numerator / f.denominator)


def render_number(v: Number) -> str:
    """Exact integers as `n`, other exacts as `p/q`, inexacts as the
    shortest decimal that round-trips."""
    if isinstance(v, float):
        text = repr(v)
        if "." not in text and "e" not in text and "E" not in text:
            text += ".0"
        return text
    return str(Fraction(v))
