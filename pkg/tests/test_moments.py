import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normord.errors import PrecisionError
from normord.interval import Interval
from normord.moments import (MomentKind, checkpoint_schedule, exact_dot, exact_sum,
                             hyperbola_divisor_sum, moment_sum, moment_sums, remainder_profile)
from normord.moments import _check_width
from normord.sieve import FunctionId, brute_oracle

# frozen from a gcd-count totient: sum_{n<=100} #{k<=n : gcd(k, n) = 1}
PHI_FIRST_100 = 3044
PHI_SECOND_100 = 140390


def test_first_moment_ten():
    assert moment_sum("phi", "first", 10, [10]).at(10) == 32


def test_second_moment_ten():
    assert moment_sum("phi", "second", 10, [10]).at(10) == 134


def test_first_moment_hundred():
    assert moment_sum("phi", "first", 100, [100]).at(100) == PHI_FIRST_100
    assert moment_sum("phi", "second", 100, [100]).at(100) == PHI_SECOND_100


def test_checkpoints_equal_direct_resummation():
    xs = checkpoint_schedule(10**5)
    series = moment_sums(FunctionId.PHI, list(MomentKind), 10**5, xs)
    vals = [brute_oracle(n, "phi") for n in range(1, 10**5 + 1)]
    for x in (xs[0], xs[5], xs[-1]):
        v = vals[:x]
        assert series[MomentKind.FIRST].at(x) == sum(v)
        assert series[MomentKind.SECOND].at(x) == sum(t * t for t in v)
        assert series[MomentKind.WEIGHTED_FIRST].at(x) == sum((i + 1) * t for i, t in enumerate(v))


def test_sums_nondecreasing():
    s = moment_sum("phi", "second", 10**5)
    assert all(b >= a for a, b in zip(s.sums, s.sums[1:]))


@pytest.mark.parametrize("f", ["phi", "d", "omega"])
@pytest.mark.parametrize("kind", list(MomentKind))
def test_stream_equals_table(f, kind):
    xs = checkpoint_schedule(60_000, start=10)
    a = moment_sum(f, kind, 60_000, xs, mode="table")
    b = moment_sum(f, kind, 60_000, xs, mode="stream", segment_size=4093)
    assert a == b


def test_arbitrary_precision_path_agrees():
    xs = [10, 500, 3000]
    for kind in MomentKind:
        assert moment_sum("phi", kind, 3000, xs) == \
            moment_sum("phi", kind, 3000, xs, arbitrary_precision=True)


def test_width_check_demands_arbitrary_precision():
    with pytest.raises(PrecisionError):
        _check_width(FunctionId.PHI, 2**32, False)
    _check_width(FunctionId.PHI, 2**32, True)
    _check_width(FunctionId.PHI, 10**9, False)


def test_mu_rejected():
    with pytest.raises(ValueError):
        moment_sum("mu", "first", 10)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 2**32 - 1), max_size=200), st.data())
def test_exact_dot_matches_python(xs, data):
    ys = data.draw(st.lists(st.integers(0, 2**32 - 1), min_size=len(xs), max_size=len(xs)))
    a = np.array(xs, dtype=np.uint64)
    b = np.array(ys, dtype=np.uint64)
    assert exact_dot(a, b) == sum(x * y for x, y in zip(xs, ys))
    assert exact_sum(a) == sum(xs)


def test_schedule_default():
    pts = checkpoint_schedule(10**7)
    assert pts[0] == 1000 and pts[-1] == 10**7
    assert 10**4 in pts and 10**5 in pts and 10**6 in pts
    assert len(pts) == 17
    assert pts[1] == math.floor(1000 * 10**0.25)


def test_schedule_appends_limit_and_small_limits():
    assert checkpoint_schedule(5000)[-1] == 5000
    assert checkpoint_schedule(10) == [10]


def test_schedule_validation():
    with pytest.raises(ValueError):
        moment_sum("phi", "first", 100, [10, 50])
    with pytest.raises(ValueError):
        moment_sum("phi", "first", 100, [50, 10, 100])


def test_hyperbola_small():
    assert hyperbola_divisor_sum(1) == 1
    assert hyperbola_divisor_sum(10) == 27


def test_hyperbola_brute_2000():
    # divisor counts by direct testing of every k <= n
    assert hyperbola_divisor_sum(2000) == 15518


def test_hyperbola_equals_sieve_1e6():
    xs = checkpoint_schedule(10**6)
    s = moment_sum("d", "first", 10**6, xs)
    assert all(hyperbola_divisor_sum(x) == v for x, v in s.checkpoints)


def test_remainder_at_ten_uses_enclosure():
    A = Interval(Fraction(3, 5), Fraction(61, 100))
    prof = remainder_profile(moment_sum("phi", "first", 10, [10]), "mertens", A)
    p = prof.checkpoints[0]
    assert p.remainder == Interval(32 - 50 * A.hi, 32 - 50 * A.lo)
    assert p.remainder.certified_positive


def test_remainder_at_ten_with_certified_A(A7):
    p = remainder_profile(moment_sum("phi", "first", 10, [10]), "mertens", A7).checkpoints[0]
    assert p.remainder.contains(32 - 50 * A7.partial)
    assert p.remainder.width == 50 * A7.enclosure.width


def test_zero_prediction_returns_raw_sum():
    s = moment_sum("phi", "second", 1000)
    prof = remainder_profile(s, "zero", None)
    for p, (_, v) in zip(prof.checkpoints, s.checkpoints):
        assert p.remainder == Interval.point(v)


def test_prediction_kind_mismatch():
    with pytest.raises(ValueError):
        remainder_profile(moment_sum("phi", "first", 100), "segal", Interval.point(1))
    with pytest.raises(ValueError):
        remainder_profile(moment_sum("phi", "first", 100), "nonsense", None)


def test_mertens_normalized_bounded(A7, table_1e7):
    s = moment_sum("phi", "first", 10**7, table=table_1e7)
    prof = remainder_profile(s, "mertens", A7)
    # observed sup on [1e3, 1e7] is about 0.052
    assert prof.sup_normalized(10**3, 10**7, bound="upper") < 0.1


def test_weighted_first_tends_to_A(A7):
    s = moment_sum("phi", "weighted_first", 10**6, [10**5, 10**6])
    errs = [abs(Fraction(3 * v, x**3) - A7.partial) for x, v in s.checkpoints]
    assert errs[1] < errs[0]
    assert errs[1] < Fraction(1, 10**5)


def test_csv_rows():
    prof = remainder_profile(moment_sum("phi", "first", 10**4), "mertens", Interval.point("0.6079271"))
    rows = prof.csv_rows()
    assert rows[0] == ["x", "sum", "prediction", "remainder", "normalized_remainder"]
    assert [int(r[0]) for r in rows[1:]] == prof.series.xs
    assert int(rows[-1][1]) == prof.series.sums[-1]
    assert len(rows[1][2].replace(".", "").lstrip("0")) <= 15
