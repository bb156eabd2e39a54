"""Domain values: the things type extensions contain and terms evaluate to.

A value is one of: bool, int, Fraction (reals are kept exact), Ident (a
named domain element) or SymRef (a vocabulary symbol used as a value).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


@dataclass(frozen=True, order=True)
class Ident:
    """A named domain element introduced by a type enumeration or constructor."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class SymRef:
    """A vocabulary symbol reified as a value (written `sym in source)."""

    name: str

    def __str__(self) -> str:
        return "`" + self.name


Value = Union[bool, int, Fraction, Ident, SymRef]


def is_number(v: Value) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def value_text(v: Value) -> str:
    """Canonical source-syntax rendering of a value."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return fraction_text(v)
    return str(v)


def fraction_text(f: Fraction) -> str:
    """Render an exact rational as a finite decimal literal.

    Only rationals whose denominator divides a power of ten are accepted;
    these are exactly the values decimal literals can produce.
    """
    num, den = f.numerator, f.denominator
    if den == 1:
        return f"{num}.0"
    k = 0
    d = den
    for p in (2, 5):
        while d % p == 0:
            d //= p
            k += 1
    if d != 1:
        raise ValueError(f"rational {f} has no finite decimal form")
    scale = 1
    digits = 0
    while (num * scale) % den:
        scale *= 10
        digits += 1
    whole = num * scale // den
    sign = "-" if whole < 0 else ""
    whole = abs(whole)
    return f"{sign}{whole // scale}.{str(whole % scale).zfill(digits)}"


def coerce_number(v: Value) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, Fraction)):
        raise TypeError(f"not a number: {v!r}")
    return Fraction(v)
