"""Closed intervals with exact rational endpoints.

All endpoints are :class:`fractions.Fraction`, so interval arithmetic here
introduces no rounding of its own. Callers that need bounded denominators
use :meth:`Interval.round_outward`.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Context, Decimal
from fractions import Fraction
from numbers import Rational


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    raise TypeError(f"cannot convert {type(v).__name__} to Fraction")


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", _frac(self.lo))
        object.__setattr__(self, "hi", _frac(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> Interval:
        v = _frac(v)
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, v) -> bool:
        v = _frac(v)
        return self.lo <= v <= self.hi

    def overlaps(self, other: Interval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    @property
    def certified_positive(self) -> bool:
        return self.lo > 0

    @property
    def certified_negative(self) -> bool:
        return self.hi < 0

    @property
    def sign_resolved(self) -> bool:
        return self.lo > 0 or self.hi < 0 or (self.lo == self.hi == 0)

    def __add__(self, other):
        o = _as_interval(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        o = _as_interval(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_interval(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def square(self) -> Interval:
        if self.lo >= 0:
            return Interval(self.lo**2, self.hi**2)
        if self.hi <= 0:
            return Interval(self.hi**2, self.lo**2)
        return Interval(0, max(self.lo**2, self.hi**2))

    def widen(self, rel) -> Interval:
        """Widen symmetrically by ``rel`` times the larger endpoint magnitude."""
        pad = _frac(rel) * max(abs(self.lo), abs(self.hi))
        return Interval(self.lo - pad, self.hi + pad)

    def round_outward(self, bits: int) -> Interval:
        """Snap endpoints outward onto the grid ``2**-bits``."""
        scale = 1 << bits
        lo = Fraction((self.lo.numerator * scale) // self.lo.denominator, scale)
        hi = Fraction(-((-self.hi.numerator * scale) // self.hi.denominator), scale)
        return Interval(lo, hi)

    def decimal_bounds(self, digits: int = 40) -> tuple[str, str]:
        """Decimal strings that still enclose the interval (outward rounding)."""
        return (
            frac_to_decimal(self.lo, digits, "floor"),
            frac_to_decimal(self.hi, digits, "ceiling"),
        )

    def __repr__(self):
        lo, hi = self.decimal_bounds(20)
        return f"Interval([{lo}, {hi}])"


def _as_interval(v) -> Interval:
    return v if isinstance(v, Interval) else Interval.point(v)


def frac_to_decimal(v, digits: int = 15, rounding: str = "nearest") -> str:
    """Render a rational with ``digits`` significant digits, rounded exactly.

    ``rounding`` is ``"nearest"`` (half-even), ``"floor"`` or ``"ceiling"``.
    """
    v = _frac(v)
    if v == 0:
        return "0"
    neg = v < 0
    a = -v if neg else v
    # exponent e with 10**e <= a < 10**(e+1)
    e = len(str(a.numerator // a.denominator)) - 1 if a >= 1 else \
        -len(str(a.denominator // a.numerator)) if a.numerator > 0 else 0
    while a >= Fraction(10) ** (e + 1):
        e += 1
    while a < Fraction(10) ** e:
        e -= 1
    scaled = a * Fraction(10) ** (digits - 1 - e)
    q, r = divmod(scaled.numerator, scaled.denominator)
    mode = rounding
    if neg and mode in ("floor", "ceiling"):
        mode = "ceiling" if mode == "floor" else "floor"
    if r:
        if mode == "ceiling":
            q += 1
        elif mode == "nearest":
            twice = 2 * r
            if twice > scaled.denominator or (twice == scaled.denominator and q % 2):
                q += 1
    if q == 10**digits:
        q //= 10
        e += 1
    d = Decimal(f"{q}E{e - digits + 1}").normalize(Context(prec=digits + 2))
    s = format(d, "f") if -7 <= e < 21 else format(d, "E")
    return ("-" if neg else "") + s
