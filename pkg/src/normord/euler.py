"""Certified enclosures for the Euler products

    A = prod_p (1 - p^-2)            (= 6 / pi^2)
    B = prod_p (1 - 2 p^-2 + p^-3)

The truncated product over ``p <= P`` is carried twice on the dyadic grid
``2**-precision``: once rounded down after every block of factors and once
rounded up, so the pair brackets the exact truncated product regardless of
how many primes are involved. The omitted primes only shrink the product;
their log-mass is at most ``c / P`` with ``c = 2`` for A and ``c = 4`` for B
(from ``-log(1 - u) <= u / (1 - u)`` and ``sum_{n > P} n^-2 <= 1 / P``), so

    lo = down(partial_down * L(c / P)),   hi = partial_up

where ``L(y)`` is an odd-order Taylor truncation of ``exp(-y)`` and hence a
lower bound for it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .interval import Interval, frac_to_decimal
from .sieve import primes_up_to

DEFAULT_PRIME_LIMIT = 10**7
DEFAULT_PRECISION = 128
MIN_PRECISION = 64
TAIL_CONSTANTS = {"A": 2, "B": 4}

_CHUNK = 256


@dataclass(frozen=True)
class EulerProductConstant:
    name: str
    truncation_prime: int
    precision: int
    partial_down: Fraction
    partial_up: Fraction
    enclosure: Interval

    @property
    def partial(self) -> Fraction:
        """Truncated product, nearest grid point to the directed pair's midpoint."""
        scale = 1 << self.precision
        mid = (self.partial_down + self.partial_up) / 2
        return Fraction(round(mid * scale), scale)

    @property
    def lo(self) -> Fraction:
        return self.enclosure.lo

    @property
    def hi(self) -> Fraction:
        return self.enclosure.hi

    @property
    def decimal_digits_certified(self) -> int:
        """Largest k with ``hi - lo < 10**-k``."""
        w = self.enclosure.width
        if w == 0:
            return self.precision * 3 // 10
        k = 0
        while w * 10 ** (k + 1) < 1:
            k += 1
        return k

    def to_record(self) -> dict:
        lo, hi = self.enclosure.decimal_bounds(40)
        return {
            "name": self.name,
            "truncation_prime": self.truncation_prime,
            "partial": frac_to_decimal(self.partial, 40),
            "lo": lo,
            "hi": hi,
            "decimal_digits_certified": self.decimal_digits_certified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _exp_neg_lower(y: Fraction) -> Fraction:
    """Rational lower bound for ``exp(-y)``, ``y >= 0``, strictly positive."""
    if y == 0:
        return Fraction(1)
    term, total, k = Fraction(1), Fraction(1), 0
    while True:
        k += 1
        term = term * (-y) / k
        total += term
        # truncating right after a negative term gives a lower bound
        if k % 2 == 1 and total > 0 and k >= 3:
            return total


def _factor(name: str, p: int) -> tuple[int, int]:
    if name == "A":
        return p * p - 1, p * p
    q = p * p * p
    return q - 2 * p + 1, q


def _evaluate(name: str, P: int, precision: int) -> EulerProductConstant:
    P, precision = int(P), int(precision)
    if P < 2:
        raise ValueError(f"truncation prime limit must be >= 2, got {P}")
    if precision < MIN_PRECISION:
        raise ValueError(f"precision {precision} bits is below the {MIN_PRECISION}-bit "
                         "minimum needed to certify the enclosure")
    scale = 1 << precision
    down = up = scale
    primes = primes_up_to(P).tolist()
    for i in range(0, len(primes), _CHUNK):
        num = den = 1
        for p in primes[i:i + _CHUNK]:
            a, b = _factor(name, p)
            num *= a
            den *= b
        down = (down * num) // den
        up = -((-up * num) // den)
    partial_down = Fraction(down, scale)
    partial_up = Fraction(up, scale)
    tail = _exp_neg_lower(Fraction(TAIL_CONSTANTS[name], P))
    lo = partial_down * tail
    lo = Fraction((lo.numerator * scale) // lo.denominator, scale)
    return EulerProductConstant(name, P, precision, partial_down, partial_up,
                                Interval(lo, partial_up))


def constant_A(P: int = DEFAULT_PRIME_LIMIT, precision: int = DEFAULT_PRECISION) -> EulerProductConstant:
    """Enclosure of ``prod_p (1 - p^-2)`` from the primes up to ``P``."""
    return _evaluate("A", P, precision)


def constant_B(P: int = DEFAULT_PRIME_LIMIT, precision: int = DEFAULT_PRECISION) -> EulerProductConstant:
    """Enclosure of ``prod_p (1 - 2 p^-2 + p^-3)`` from the primes up to ``P``."""
    return _evaluate("B", P, precision)


def _enclosure(c) -> Interval:
    return c if isinstance(c, Interval) else c.enclosure


def criterion_margin(a, b) -> Interval:
    """Certified interval for ``B - A**2``: ``[b.lo - a.hi**2, b.hi - a.lo**2]``.

    Accepts constants or bare intervals. The sign is certified only when the
    result excludes zero (``.certified_positive``).
    """
    ea, eb = _enclosure(a), _enclosure(b)
    if ea.lo < 0:
        raise ValueError("A enclosure must be nonnegative")
    return Interval(eb.lo - ea.hi**2, eb.hi - ea.lo**2)
