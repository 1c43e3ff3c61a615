import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normord.errors import CapacityError
from normord.sieve import (FunctionId, MAGIC, brute_oracle, build_table, dump_table,
                           iter_segments, load_table, primes_up_to, storage_dtype,
                           stream_segments)

PHI, MU, D, OMEGA = FunctionId.PHI, FunctionId.MU, FunctionId.DIVISOR_COUNT, FunctionId.OMEGA


def _eratosthenes(n):
    flags = bytearray([1]) * (n + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i::i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, f in enumerate(flags) if f]


def test_table_limit_one():
    tb = build_table(1, {PHI})
    assert tb.values[PHI].tolist() == [1]


def test_table_limit_ten():
    assert build_table(10, {PHI})[PHI].tolist() == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]


def test_values_at_one(table_1e4):
    assert [table_1e4.at(f, 1) for f in (PHI, MU, D, OMEGA)] == [1, 1, 1, 0]


def test_table_matches_oracle_exhaustively(table_1e4):
    for f in FunctionId:
        expected = [brute_oracle(n, f) for n in range(1, 10**4 + 1)]
        assert table_1e4.values[f].tolist() == expected, f.name


def test_spf_is_prime_divisor(table_1e4):
    primes = set(primes_up_to(10**4).tolist())
    spf = table_1e4.spf
    for n in range(2, 10**4 + 1):
        p = int(spf[n])
        assert p in primes and n % p == 0
        assert all(n % q for q in range(2, p))


def test_only_requested_functions():
    tb = build_table(50, {"phi", "omega"})
    assert tb.functions == {PHI, OMEGA}


def test_limit_zero_rejected():
    with pytest.raises(ValueError):
        build_table(0)


def test_cap_enforced():
    with pytest.raises(CapacityError, match="streaming"):
        build_table(1001, cap=1000)


def test_storage_widths():
    assert storage_dtype(PHI, 10**7) == np.uint32
    assert storage_dtype(PHI, 200) == np.uint8
    assert storage_dtype(D, 10**7) == np.uint16
    assert storage_dtype(MU, 10**7) == np.int8


@pytest.mark.parametrize("n,f,expected", [(12, OMEGA, 2), (36, D, 9), (10, PHI, 4),
                                          (1, MU, 1), (30, MU, -1), (12, MU, 0), (97, PHI, 96)])
def test_brute_oracle(n, f, expected):
    assert brute_oracle(n, f) == expected


def test_brute_phi_matches_gcd_count():
    for n in range(1, 300):
        assert brute_oracle(n, PHI) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def test_primes_up_to_small():
    assert primes_up_to(0).tolist() == []
    assert primes_up_to(1).tolist() == []
    assert primes_up_to(10).tolist() == [2, 3, 5, 7]


def test_primes_up_to_million():
    ps = primes_up_to(10**6)
    assert len(ps) == 78498
    assert ps.tolist() == _eratosthenes(10**6)


def test_segment_partition():
    seen = []
    stream_segments(10, 4, {PHI}, lambda s: seen.append((s.lo, s.hi)))
    assert seen == [(1, 4), (5, 8), (9, 10)]


def test_single_segment():
    segs = list(iter_segments(10, 100, {PHI}))
    assert [(s.lo, s.hi) for s in segs] == [(1, 10)]
    assert segs[0][PHI].tolist() == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]


def test_stream_equals_table_1e5():
    tb = build_table(10**5)
    parts = {f: [] for f in FunctionId}
    for seg in iter_segments(10**5, 2**14):
        assert len(seg) <= 2**14
        for f in FunctionId:
            parts[f].append(seg.values[f])
    for f in FunctionId:
        got = np.concatenate(parts[f])
        assert got.dtype == tb.values[f].dtype
        assert np.array_equal(got, tb.values[f])


@settings(max_examples=30, deadline=None)
@given(limit=st.integers(1, 3000), size=st.integers(1, 700))
def test_stream_equals_table_any_partition(limit, size):
    tb = build_table(limit)
    for seg in iter_segments(limit, size):
        for f in FunctionId:
            assert np.array_equal(seg.values[f], tb.values[f][seg.lo - 1: seg.hi])


def test_segment_arguments_validated():
    with pytest.raises(ValueError):
        list(iter_segments(10, 0))
    with pytest.raises(ValueError):
        list(iter_segments(0, 4))


@settings(max_examples=200, deadline=None)
@given(m=st.integers(1, 100), n=st.integers(1, 100))
def test_multiplicativity(table_1e4, m, n):
    if math.gcd(m, n) != 1:
        return
    at = table_1e4.at
    assert at(PHI, m * n) == at(PHI, m) * at(PHI, n)
    assert at(D, m * n) == at(D, m) * at(D, n)
    assert at(MU, m * n) == at(MU, m) * at(MU, n)
    assert at(OMEGA, m * n) == at(OMEGA, m) + at(OMEGA, n)


def test_multiplicativity_exhaustive(table_1e4):
    phi = table_1e4[PHI].astype(np.int64)
    d = table_1e4[D].astype(np.int64)
    for m in range(1, 101):
        for n in range(1, 10**4 // m + 1):
            if math.gcd(m, n) == 1:
                assert phi[m * n - 1] == phi[m - 1] * phi[n - 1]
                assert d[m * n - 1] == d[m - 1] * d[n - 1]


def test_totient_divisor_sum(table_1e4):
    phi = table_1e4[PHI].astype(np.int64)
    acc = np.zeros(10**4 + 1, dtype=np.int64)
    for k in range(1, 10**4 + 1):
        acc[k::k] += phi[k - 1]
    assert np.array_equal(acc[1:], np.arange(1, 10**4 + 1))


def test_mu_zero_iff_square_factor(table_1e4):
    mu = table_1e4[MU]
    for n in range(1, 10**4 + 1):
        squareful = any(n % (p * p) == 0 for p in range(2, math.isqrt(n) + 1))
        assert (mu[n - 1] == 0) == squareful


def test_phi_class_m_bound(table_1e4):
    phi = table_1e4[PHI].astype(np.int64)
    n = np.arange(1, 10**4 + 1)
    assert np.all(phi >= 0) and np.all(phi < 2 * n)


def test_dump_roundtrip_bit_exact(tmp_path):
    tb = build_table(5000)
    p1 = dump_table(tb, tmp_path / "t.nord")
    raw = p1.read_bytes()
    assert raw.startswith(MAGIC)
    back = load_table(p1)
    assert back.limit == 5000
    for f in FunctionId:
        assert back.values[f].dtype == tb.values[f].dtype
        assert np.array_equal(back.values[f], tb.values[f])
    assert np.array_equal(back.spf, tb.spf)
    p2 = dump_table(back, tmp_path / "u.nord")
    assert p2.read_bytes() == raw


def test_dump_without_spf_recomputes(tmp_path):
    tb = build_table(300, {PHI})
    back = load_table(dump_table(tb, tmp_path / "t.nord", include_spf=False))
    assert np.array_equal(back.spf, tb.spf)
    assert back.functions == {PHI}


def test_load_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.nord"
    bad.write_bytes(b"XXXXX" + bytes(20))
    with pytest.raises(ValueError, match="magic"):
        load_table(bad)
    tb = build_table(100)
    good = dump_table(tb, tmp_path / "ok.nord").read_bytes()
    (tmp_path / "cut.nord").write_bytes(good[:-10])
    with pytest.raises(ValueError, match="truncated"):
        load_table(tmp_path / "cut.nord")
