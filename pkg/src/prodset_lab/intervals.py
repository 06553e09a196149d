"""Minimal outward-rounded interval arithmetic for verified circle maps.

Directed rounding is emulated by stepping results outward with
``math.nextafter``; transcendental calls (tan, atan) get a 4-ulp outward
margin, generous against libm's documented ~2 ulp worst case. Widths stay
near 1e-15 per operation while the verification margins used by callers are
1e-9, so the slack is orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import LabError

_TRANS_ULPS = 4


class PrecisionError(LabError):
    """Interval evaluation cannot certify the requested comparison."""


def _up(x: float, steps: int = 1) -> float:
    for _ in range(steps):
        x = math.nextafter(x, math.inf)
    return x


def _down(x: float, steps: int = 1) -> float:
    for _ in range(steps):
        x = math.nextafter(x, -math.inf)
    return x


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo > self.hi:
            raise PrecisionError(f"bad interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "Interval":
        x = float(f)
        lo = x if Fraction(x) <= f else _down(x)
        hi = x if Fraction(x) >= f else _up(x)
        return cls(lo, hi)

    @classmethod
    def enclose(cls, value) -> "Interval":
        if isinstance(value, Interval):
            return value
        if isinstance(value, Fraction):
            return cls.from_fraction(value)
        if isinstance(value, int):
            return cls.point(float(value))
        return cls.point(float(value))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __add__(self, other) -> "Interval":
        o = Interval.enclose(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    def __sub__(self, other) -> "Interval":
        o = Interval.enclose(other)
        return Interval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other) -> "Interval":
        o = Interval.enclose(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(products)), _up(max(products)))

    def divided_by(self, other) -> "Interval":
        o = Interval.enclose(other)
        if o.lo <= 0 <= o.hi:
            raise PrecisionError("division by an interval containing zero")
        quotients = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(quotients)), _up(max(quotients)))

    def shift_by_int(self, k: int) -> "Interval":
        return Interval(_down(self.lo - k), _up(self.hi - k))

    def shift_to_near_zero(self) -> "Interval":
        """Translate by the nearest integer to the midpoint."""
        return self.shift_by_int(round(self.mid))


PI = Interval(_down(math.pi), _up(math.pi))


def tan_pi(x: Interval) -> Interval:
    """Enclosure of tan(pi * x) for x strictly inside (-1/2, 1/2)."""
    if not (-0.5 < x.lo and x.hi < 0.5):
        raise PrecisionError(f"tan_pi argument [{x.lo}, {x.hi}] touches the pole")
    arg = x * PI
    return Interval(_down(math.tan(arg.lo), _TRANS_ULPS), _up(math.tan(arg.hi), _TRANS_ULPS))


def atan_over_pi(u: Interval) -> Interval:
    """Enclosure of atan(u) / pi (the true value lies in (-1/2, 1/2))."""
    raw = Interval(_down(math.atan(u.lo), _TRANS_ULPS), _up(math.atan(u.hi), _TRANS_ULPS))
    return raw.divided_by(PI)
