import json
from fractions import Fraction

import mpmath
import pytest

from normord.euler import _exp_neg_lower, constant_A, constant_B, criterion_margin
from normord.interval import Interval

mpmath.mp.dps = 50
SIX_OVER_PI2 = Fraction(str(6 / mpmath.pi**2))


def test_A_single_factor():
    a = constant_A(2)
    assert a.partial == Fraction(3, 4)
    assert a.partial_down == a.partial_up == Fraction(3, 4)


def test_A_two_factors():
    a = constant_A(3)
    assert a.partial_down <= Fraction(2, 3) <= a.partial_up
    assert abs(a.partial - Fraction(2, 3)) < Fraction(1, 2**120)


def test_B_small():
    assert constant_B(2).partial == Fraction(5, 8)
    b = constant_B(3)
    assert b.partial_down <= Fraction(275, 540) <= b.partial_up


@pytest.mark.parametrize("P", [2, 3, 10, 1000])
def test_enclosures_in_unit_interval(P):
    for c in (constant_A(P), constant_B(P)):
        assert 0 < c.lo < c.hi <= 1


def test_A_contains_closed_form(A7):
    assert A7.enclosure.contains(SIX_OVER_PI2)
    assert A7.enclosure.width < Fraction(1, 10**6)


@pytest.mark.parametrize("P", [2, 3, 100, 10**4, 10**5])
def test_A_contains_closed_form_small_P(P):
    assert constant_A(P).enclosure.contains(SIX_OVER_PI2)


def _B_reference():
    # truncated product to 10**6 as an mpmath log-sum, no fixed-point arithmetic
    from normord.sieve import primes_up_to
    with mpmath.workdps(30):
        logsum = mpmath.fsum(mpmath.log(1 - mpmath.mpf(2) / p**2 + mpmath.mpf(1) / p**3)
                             for p in primes_up_to(10**6).tolist())
        return logsum


def test_B_enclosures_overlap_and_nest(B7):
    b6 = constant_B(10**6)
    assert b6.enclosure.overlaps(B7.enclosure)
    assert B7.enclosure.width < b6.enclosure.width
    assert B7.enclosure.width < Fraction(1, 10**6)
    assert b6.partial > B7.partial


def test_B_truncated_product_agrees_with_mpmath():
    b6 = constant_B(10**6)
    ref = Fraction(str(mpmath.exp(_B_reference())))
    assert abs(b6.partial - ref) < Fraction(1, 10**20)


def test_partials_strictly_decrease():
    vals = [constant_A(P).partial for P in (2, 3, 5, 7, 11, 100)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_enclosures_mutually_intersect():
    encs = [constant_A(P).enclosure for P in (10, 100, 1000, 10**4)]
    for i, a in enumerate(encs):
        for b in encs[i + 1:]:
            assert a.overlaps(b)
            assert b.width < a.width


def test_precision_floor():
    with pytest.raises(ValueError):
        constant_A(100, precision=63)
    with pytest.raises(ValueError):
        constant_B(1)


def test_exp_lower_bound():
    for y in (Fraction(0), Fraction(1, 10**7), Fraction(1, 2), Fraction(1), Fraction(2)):
        lb = _exp_neg_lower(y)
        assert 0 < lb <= Fraction(str(mpmath.exp(-mpmath.mpf(y.numerator) / y.denominator)))


def test_margin_boundary_unresolved():
    m = criterion_margin(Interval(1, 1), Interval(1, 1))
    assert m == Interval(0, 0)
    assert not m.certified_positive


def test_margin_hand_example():
    m = criterion_margin(Interval("0.6", "0.61"), Interval("0.42", "0.43"))
    assert m == Interval(Fraction("0.0479"), Fraction("0.07"))
    assert m.certified_positive


def test_margin_at_P_1e6():
    m = criterion_margin(constant_A(10**6), constant_B(10**6))
    assert m.certified_positive
    assert m.width < Fraction(1, 10**4)


def test_margin_never_flips():
    prev = None
    for P in (10**3, 10**4, 10**5):
        m = criterion_margin(constant_A(P), constant_B(P))
        assert m.certified_positive
        if prev is not None:
            assert m.overlaps(prev)
        prev = m


def test_json_record(A7):
    rec = json.loads(A7.to_json())
    assert set(rec) == {"name", "truncation_prime", "partial", "lo", "hi", "decimal_digits_certified"}
    assert rec["truncation_prime"] == 10**7
    assert Fraction(rec["lo"]) <= A7.lo and Fraction(rec["hi"]) >= A7.hi
    assert Fraction(rec["lo"]) <= SIX_OVER_PI2 <= Fraction(rec["hi"])
    assert rec["decimal_digits_certified"] == 6
