"""Certified enclosures with rational endpoints.

Long products are evaluated in fixed point with outward rounding, so the
endpoints keep a bounded denominator no matter how many factors go in.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

# fractional bits used by the outward-rounded products
PRECISION_BITS = 128
_ONE = 1 << PRECISION_BITS


@dataclass(frozen=True)
class IntervalValue:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not 0 <= lo <= hi <= 1:
            raise ValueError(f"invalid enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, value) -> "IntervalValue":
        return cls(Fraction(value), Fraction(value))

    @classmethod
    def clamped(cls, lo, hi) -> "IntervalValue":
        """Intersect [lo, hi] with [0, 1]; the caller knows the true value is a probability."""
        lo = min(max(Fraction(lo), Fraction(0)), Fraction(1))
        hi = min(max(Fraction(hi), Fraction(0)), Fraction(1))
        return cls(lo, max(lo, hi))

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> Fraction:
        if not self.is_exact:
            raise ValueError("enclosure is not exact")
        return self.lo

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        if isinstance(x, float):
            x = Fraction(x)
        return self.lo <= x <= self.hi

    def distance(self, x) -> Fraction:
        """Distance from x to the nearest point of the enclosure."""
        x = Fraction(x)
        if x < self.lo:
            return self.lo - x
        if x > self.hi:
            return x - self.hi
        return Fraction(0)

    def scale(self, c) -> "IntervalValue":
        c = Fraction(c)
        if c < 0:
            raise ValueError("scale factor must be non-negative")
        return IntervalValue(self.lo * c, self.hi * c)

    def __str__(self) -> str:
        if self.is_exact:
            return str(self.lo)
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


def fixed_product(factors: Iterable[tuple[int, int]]) -> tuple[Fraction, Fraction]:
    """Enclose prod(num/den) for factors with 0 <= num <= den.

    Returns (lo, hi) with denominators 2**PRECISION_BITS.
    """
    lo = hi = _ONE
    for num, den in factors:
        lo = lo * num // den
        hi = -(-hi * num // den)
        if hi == 0:
            break
    return Fraction(lo, _ONE), Fraction(hi, _ONE)


def exact_product(factors: Iterable[tuple[int, int]]) -> Fraction:
    num = den = 1
    for a, b in factors:
        num *= a
        den *= b
        if num == 0:
            return Fraction(0)
    return Fraction(num, den)


def weierstrass_floor(value: Fraction, rate: Fraction) -> Fraction:
    """Lower bound value * (1 - rate), clamped at 0.

    prod(1 - x_k) >= 1 - sum(x_k) for x_k in [0, 1].
    """
    factor = 1 - rate
    return value * factor if factor > 0 else Fraction(0)
