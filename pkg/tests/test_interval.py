from decimal import Context, Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from normord.interval import Interval, frac_to_decimal

fracs = st.fractions(-10**6, 10**6, max_denominator=10**9)


@given(fracs, fracs, fracs, fracs, st.floats(0, 1), st.floats(0, 1))
def test_arithmetic_contains_pointwise(a, b, c, d, s, t):
    x = Interval(min(a, b), max(a, b))
    y = Interval(min(c, d), max(c, d))
    px = x.lo + Fraction(s) * x.width
    py = y.lo + Fraction(t) * y.width
    assert (x + y).contains(px + py)
    assert (x - y).contains(px - py)
    assert (x * y).contains(px * py)
    assert x.square().contains(px * px)


@given(fracs)
def test_decimal_matches_decimal_module(v):
    ctx = Context(prec=15)
    ref = ctx.divide(Decimal(v.numerator), Decimal(v.denominator))
    assert Decimal(frac_to_decimal(v, 15)) == ref


@given(fracs)
def test_directed_decimals_bracket(v):
    assert Fraction(frac_to_decimal(v, 12, "floor")) <= v <= Fraction(frac_to_decimal(v, 12, "ceiling"))


@given(fracs, fracs, st.integers(8, 80))
def test_round_outward_encloses(a, b, bits):
    x = Interval(min(a, b), max(a, b))
    r = x.round_outward(bits)
    assert r.lo <= x.lo and r.hi >= x.hi
    assert r.lo.denominator <= 2**bits and r.hi.denominator <= 2**bits


def test_empty_rejected():
    with pytest.raises(ValueError):
        Interval(1, 0)


def test_division_by_zero_interval():
    with pytest.raises(ZeroDivisionError):
        Interval(1, 2) / Interval(-1, 1)
