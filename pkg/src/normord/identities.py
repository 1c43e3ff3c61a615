"""Exact rational checks of the multiplicative identities behind the moment formulas.

* ``phi(n) / n == sum_{d | n} mu(d) / d``
* ``(sum_{d | n} mu(d) / d)**2 == sum_{a | n} mu(a)**2 g(a) / a**2`` with
  ``g(a) = prod_{p | a} (1 - 2p)``
* ``|g(b)| <= prod_{p | b} 2p <= 2**omega(b) * b <= d(b) * b``

Everything is evaluated with :class:`fractions.Fraction` over divisors
enumerated from a trial-division factorization. No floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .sieve import FunctionId, SieveTable, factorize

DEFAULT_IDENTITY_LIMIT = 10**4


def divisors(n: int, fac: dict = None) -> list[int]:
    fac = factorize(n) if fac is None else fac
    out = [1]
    for p, e in fac.items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def _mu(fac: dict) -> int:
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def squarefree_divisors(fac: dict) -> list[tuple[int, list[int]]]:
    """``(a, primes of a)`` for every squarefree divisor ``a``."""
    ps = sorted(fac)
    out = []
    for mask in product((0, 1), repeat=len(ps)):
        chosen = [p for p, m in zip(ps, mask) if m]
        out.append((math.prod(chosen), chosen))
    return out


def mobius_ratio(n: int) -> Fraction:
    """``sum_{d | n} mu(d) / d`` as an exact rational (equals ``phi(n) / n``)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    fac = factorize(n)
    # only squarefree divisors have mu != 0
    return sum((Fraction((-1) ** len(ps), a) for a, ps in squarefree_divisors(fac)), Fraction(0))


def g(a: int) -> int:
    """``prod_{p | a} (1 - 2p)`` over the distinct primes of ``a``; ``g(1) == 1``."""
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    return math.prod(1 - 2 * p for p in factorize(a))


def squared_identity_sides(n: int) -> tuple[Fraction, Fraction]:
    """Both sides of the squared identity, each from its own divisor sum."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    fac = factorize(n)
    ds = divisors(n, fac)
    left = Fraction(0)
    for d in ds:
        m = _mu(factorize(d))
        if m:
            left += Fraction(m, d)
    left = left * left
    right = Fraction(0)
    for a in ds:
        fa = factorize(a)
        if _mu(fa) == 0:
            continue
        right += Fraction(math.prod(1 - 2 * p for p in fa), a * a)
    return left, right


def squared_identity_check(n: int) -> bool:
    left, right = squared_identity_sides(n)
    return left == right


def g_bound_chain(b: int) -> tuple[int, int, int, int]:
    """``(|g(b)|, prod 2p, 2**omega(b) * b, d(b) * b)``."""
    if b < 1:
        raise ValueError(f"b must be >= 1, got {b}")
    fac = factorize(b)
    gb = abs(math.prod(1 - 2 * p for p in fac))
    two_p = math.prod(2 * p for p in fac)
    return gb, two_p, 2 ** len(fac) * b, math.prod(e + 1 for e in fac.values()) * b


def g_bound_check(b: int) -> bool:
    g_abs, two_p, pow_b, d_b = g_bound_chain(b)
    return g_abs <= two_p <= pow_b <= d_b


@dataclass
class IdentityReport:
    limit: int
    checked: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    first_counterexample: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())

    def _record(self, name: str, n: int, ok: bool) -> None:
        self.checked[name] = self.checked.get(name, 0) + 1
        self.failures.setdefault(name, 0)
        if not ok:
            self.failures[name] += 1
            self.first_counterexample.setdefault(name, n)


def verify_identities(limit: int = DEFAULT_IDENTITY_LIMIT, table: SieveTable = None) -> IdentityReport:
    """Run every identity for ``1 <= n <= limit``.

    ``mobius_ratio`` is compared against ``phi(n) / n`` taken from ``table``
    when one is given (and covers ``limit``), otherwise from a trial-division
    totient.
    """
    from .sieve import brute_oracle

    rep = IdentityReport(limit)
    use_table = table is not None and table.limit >= limit and FunctionId.PHI in table.values
    for n in range(1, limit + 1):
        phi = int(table.values[FunctionId.PHI][n - 1]) if use_table else brute_oracle(n, FunctionId.PHI)
        rep._record("mobius_ratio", n, mobius_ratio(n) == Fraction(phi, n))
        rep._record("squared_identity", n, squared_identity_check(n))
        rep._record("g_bound", n, g_bound_check(n))
    return rep
