"""Exact rational numbers.

The whole library computes over ``fractions.Fraction``: arbitrary-precision
integers, always stored in lowest terms with a positive denominator, and no
rounding anywhere.  This module fixes the wire format ("p/q", or "n" for
integers) and provides the few helpers the rest of the code shares.
"""

from __future__ import annotations

from fractions import Fraction

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value: int | str | Fraction) -> Fraction:
    """Coerce an int, a "p/q"/"n" string, or a Fraction to an exact Rational.

    Floats are rejected: silently admitting binary floats would smuggle
    rounding into a library whose contract is exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise TypeError(f"not an exact rational: {value!r}")
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """Render as "p/q", or "n" when the denominator is 1. Round-trips via rat()."""
    return str(value)


def approx_decimal(value: Fraction, digits: int = 6) -> str:
    """Decimal rendering for display only, computed by integer arithmetic.

    The result is marked approximate by callers; it never feeds computation.
    """
    sign = "-" if value < 0 else ""
    mag = -value if value < 0 else value
    scale = 10**digits
    scaled = (mag.numerator * scale + mag.denominator // 2) // mag.denominator
    whole, frac = divmod(scaled, scale)
    text = f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")
    return text + "0" if text.endswith(".") else text
