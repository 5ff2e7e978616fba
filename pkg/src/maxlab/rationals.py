"""Exact rational helpers: parsing, formatting, integer power/root bounds."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

INF = float("inf")


def parse_rational(value: object) -> Fraction:
    """Interpret ``value`` ("p/q" string, int, or Fraction) as an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def is_inf(p: object) -> bool:
    return isinstance(p, float) and math.isinf(p)


def parse_p(value: object) -> Fraction | float:
    """Parse an integrability exponent; accepts "inf" for the sup-norm endpoint."""
    if is_inf(value):
        return INF
    if isinstance(value, str) and value.strip().lower() in {"inf", "infinity", "oo"}:
        return INF
    return parse_rational(value)


def format_p(p: Fraction | float) -> str:
    return "inf" if is_inf(p) else format_rational(p)


def format_double(x: float) -> str:
    return format(x, ".17g")


def common_denominator(values: Iterable[Fraction]) -> int:
    dens = [v.denominator for v in values]
    return math.lcm(*dens) if dens else 1


def iroot_floor(x: int, b: int) -> int:
    """Largest integer r with r**b <= x (x >= 0, b >= 1)."""
    if x < 0 or b < 1:
        raise ValueError("iroot_floor needs x >= 0 and b >= 1")
    if b == 1 or x in (0, 1):
        return x
    r = 1 << ((x.bit_length() + b - 1) // b)
    while True:
        nr = ((b - 1) * r + x // r ** (b - 1)) // b
        if nr >= r:
            break
        r = nr
    while r**b > x:
        r -= 1
    while (r + 1) ** b <= x:
        r += 1
    return r


def pow_floor(base: int, exp: Fraction) -> int:
    """floor(base ** exp) for integer base >= 1 and rational exp >= 0."""
    if base < 1 or exp < 0:
        raise ValueError("pow_floor needs base >= 1 and exp >= 0")
    return iroot_floor(base ** exp.numerator, exp.denominator)


def pow_ceil(base: int, exp: Fraction) -> int:
    """ceil(base ** exp) for integer base >= 1 and rational exp >= 0."""
    if base < 1 or exp < 0:
        raise ValueError("pow_ceil needs base >= 1 and exp >= 0")
    power = base ** exp.numerator
    r = iroot_floor(power, exp.denominator)
    return r if r ** exp.denominator == power else r + 1


def log_fraction(q: Fraction) -> float:
    """log(q) computed from numerator/denominator; immune to float overflow."""
    if q <= 0:
        raise ValueError("log of a non-positive rational")
    return math.log(q.numerator) - math.log(q.denominator)


def pow_float(q: Fraction, e: float) -> float:
    """q ** e as a double for q >= 0; exact zero maps to zero."""
    if q == 0:
        return 0.0
    return math.exp(log_fraction(q) * e)


def root_float(q: Fraction, p: Fraction | float) -> float:
    """q ** (1/p) as a double for q >= 0 and finite p > 0."""
    if is_inf(p):
        raise ValueError("root_float needs a finite exponent")
    return pow_float(q, 1.0 / float(p))
