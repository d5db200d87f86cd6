"""Shared numeric helpers for the exact (rational) and float backends.

Values throughout the package are plain ints, floats or ``fractions.Fraction``.
Operations that promise exactness require rational inputs; sweeps use floats.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

Real = Union[int, float, Fraction]

EXACT_TYPES = (int, Fraction)


def is_exact(x: Real) -> bool:
    return isinstance(x, EXACT_TYPES)


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def as_fraction(x: Real) -> Fraction:
    """Convert to Fraction; floats convert via exact binary value."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def parse_number(obj) -> Real:
    """Parse a JSON-carried number: int/float as-is, "p/q" strings as Fraction."""
    if isinstance(obj, bool):
        raise ValueError("boolean is not a number")
    if isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, str):
        return Fraction(obj)
    raise ValueError(f"cannot parse number from {obj!r}")


def number_to_json(x: Real):
    """Serialize a number; Fractions become "p/q" strings so exactness survives."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return f"{x.numerator}/{x.denominator}"
    return x
