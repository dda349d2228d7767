"""Exact rational parsing and rendering shared by the model loader and the CLI.

Accepted inputs: "p/q" strings, decimal strings, plain integers, and
`Fraction` itself. Decimal inputs convert exactly (scaled integers), never
through binary floats.
"""

from __future__ import annotations

from fractions import Fraction


class RationalParseError(ValueError):
    """Raised when a value cannot be read as an exact rational."""


def to_rational(value: object) -> Fraction:
    """Convert a JSON scalar to an exact Fraction.

    Floats are rejected: the model loader parses JSON numbers with
    ``parse_float=Fraction`` so a genuine ``float`` here means the caller
    bypassed exact parsing.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise RationalParseError(f"expected a rational, got boolean {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise RationalParseError(f"cannot parse rational from {value!r}") from exc
    if isinstance(value, float):
        raise RationalParseError(
            f"refusing inexact float {value!r}; parse the document with exact numbers"
        )
    raise RationalParseError(f"cannot parse rational from {value!r}")


def format_rational(x: Fraction) -> str:
    """Render as "p/q" (or "p" for integers), the form save_model emits."""
    return str(x)


def format_with_decimal(x: Fraction | float, digits: int = 12) -> str:
    """Human rendering: exact form plus a 12-significant-digit decimal."""
    if isinstance(x, Fraction):
        return f"{x} (={float(x):.{digits}g})"
    return f"{x:.{digits}g}"
