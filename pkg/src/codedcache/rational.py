"""Exact rational helpers.

All memories, rates and entropies are ``fractions.Fraction`` values (file
size normalised to one).  This module only adds parsing and formatting in the
``"p/q"`` text form used by every serialised output.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")

RationalLike = Union[Fraction, int, str]


def parse_rational(text: RationalLike) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into a Fraction.

    Decimal and scientific notation are rejected on purpose: every quantity in
    this package is exact, and silently accepting ``0.1`` would hide rounding.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"cannot interpret {text!r} as an exact rational")
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise ValueError(
            f"not an exact rational: {text!r} (use 'p/q' or an integer; decimals are rejected)"
        )
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(value: RationalLike) -> str:
    """Format as ``"p/q"``, or ``"p"`` when the denominator is one."""
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_line(intercept: Fraction, slope: Fraction, var: str = "M") -> str:
    """Render ``intercept + slope*var`` as e.g. ``"11/4 - 2M"``."""
    parts = []
    if intercept != 0 or slope == 0:
        parts.append(format_rational(intercept))
    if slope != 0:
        mag = abs(slope)
        coef = "" if mag == 1 else format_rational(mag)
        term = f"{coef}{var}"
        if parts:
            parts.append(("- " if slope < 0 else "+ ") + term)
        else:
            parts.append(("-" if slope < 0 else "") + term)
    return " ".join(parts)
