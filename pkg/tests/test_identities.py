import math
from fractions import Fraction

import pytest

from normord.identities import (g, g_bound_chain, g_bound_check, mobius_ratio,
                                squared_identity_check, squared_identity_sides, verify_identities)
from normord.sieve import brute_oracle


def test_mobius_ratio_examples():
    assert mobius_ratio(1) == Fraction(1)
    assert mobius_ratio(6) == Fraction(1, 3)


def test_g_examples():
    assert g(1) == 1
    assert g(6) == 15
    assert g(12) == 15


def test_squared_identity_examples():
    assert squared_identity_sides(1) == (1, 1)
    assert squared_identity_sides(2) == (Fraction(1, 4), Fraction(1, 4))


def test_g_bound_examples():
    assert g_bound_chain(1) == (1, 1, 1, 1)
    assert g_bound_chain(6) == (15, 24, 24, 24)
    assert g_bound_check(1) and g_bound_check(6)


def test_exhaustive_2000(table_1e4):
    rep = verify_identities(2000, table_1e4)
    assert rep.passed
    assert rep.checked == {"mobius_ratio": 2000, "squared_identity": 2000, "g_bound": 2000}


def test_mobius_ratio_without_table():
    rep = verify_identities(300)
    assert rep.passed


def test_g_multiplicative_on_coprime():
    for m in range(1, 300):
        for n in range(1, 300):
            if math.gcd(m, n) == 1:
                assert g(m * n) == g(m) * g(n)


def test_g_depends_on_radical():
    for n in range(1, 2000):
        rad = math.prod({p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))})
        assert g(n) == g(rad)


def test_two_pow_omega_le_d(table_1e4):
    for b in range(1, 10**4 + 1):
        assert 2 ** table_1e4.at("omega", b) <= table_1e4.at("d", b)


def test_failure_is_reported(monkeypatch):
    import normord.identities as ident
    monkeypatch.setattr(ident, "g_bound_check", lambda b: b != 7)
    rep = ident.verify_identities(20)
    assert not rep.passed
    assert rep.failures["g_bound"] == 1
    assert rep.first_counterexample == {"g_bound": 7}


@pytest.mark.parametrize("n", [1, 2, 12, 360, 9699690, 2**20])
def test_identities_on_structured_n(n):
    assert mobius_ratio(n) == Fraction(brute_oracle(n, "phi"), n)
    assert squared_identity_check(n)
    assert g_bound_check(n)
