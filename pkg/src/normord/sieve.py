"""Tabulation of phi, mu, d, omega and smallest prime factors.

Two production paths share one set of semantics:

* :func:`build_table` runs a linear sieve up to ``limit`` and derives every
  function from the smallest-prime-factor recurrence in a single pass.
* :func:`stream_segments` walks ``1..limit`` in fixed-size blocks, factoring
  each block against the primes up to ``sqrt(hi)``. Nothing of size
  ``limit`` is ever allocated, which is what makes ``x = 10**8`` sums fit
  in a desk-scale memory budget.

:func:`brute_oracle` is the independent reference: plain trial division,
no sieve state.

Array convention: ``table.values[f][n - 1] == f(n)`` (the arrays cover
``1..limit``), while ``table.spf[n]`` is indexed directly by ``n`` and holds
0 for ``n < 2``.
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np
from numba import njit

from .errors import CapacityError

DEFAULT_MATERIALIZATION_CAP = 10**7
DEFAULT_SEGMENT_SIZE = 1 << 18


class FunctionId(enum.IntEnum):
    """Arithmetic functions the sieves tabulate; the value is the dump order."""

    PHI = 0
    MU = 1
    DIVISOR_COUNT = 2
    OMEGA = 3

    @classmethod
    def parse(cls, name) -> FunctionId:
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "_")
        aliases = {"D": "DIVISOR_COUNT", "DIVISORS": "DIVISOR_COUNT", "TOTIENT": "PHI", "MOBIUS": "MU"}
        return cls[aliases.get(key, key)]


ALL_FUNCTIONS = frozenset(FunctionId)


def storage_dtype(f: FunctionId, limit: int) -> np.dtype:
    """Smallest exact dtype holding ``f(n)`` for every ``n <= limit``."""
    if f is FunctionId.MU:
        return np.dtype(np.int8)
    if f is FunctionId.OMEGA:
        return np.dtype(np.uint8)
    bound = limit if f is FunctionId.PHI else min(limit, 2 * math.isqrt(limit))
    for dt in (np.uint8, np.uint16, np.uint32, np.uint64):
        if bound <= np.iinfo(dt).max:
            return np.dtype(dt)
    raise CapacityError(f"no fixed-width dtype for {f.name} up to {limit}")


def _spf_dtype(limit: int) -> np.dtype:
    return np.dtype(np.int32) if limit < 2**31 else np.dtype(np.int64)


@dataclass(frozen=True)
class SieveTable:
    limit: int
    spf: np.ndarray
    values: dict = field(default_factory=dict)

    def __getitem__(self, f) -> np.ndarray:
        return self.values[FunctionId.parse(f)]

    def at(self, f, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(f"n={n} outside 1..{self.limit}")
        return int(self.values[FunctionId.parse(f)][n - 1])

    @property
    def functions(self) -> frozenset:
        return frozenset(self.values)


@dataclass(frozen=True)
class Segment:
    lo: int
    hi: int
    values: dict

    def __len__(self):
        return self.hi - self.lo + 1

    def __getitem__(self, f) -> np.ndarray:
        return self.values[FunctionId.parse(f)]


# -- kernels -------------------------------------------------------------


@njit(cache=True)
def _linear_sieve(limit, spf, primes):
    count = 0
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[count] = i
            count += 1
        si = spf[i]
        for j in range(count):
            p = primes[j]
            if p > si or p * i > limit:
                break
            spf[p * i] = p
    return count


@njit(cache=True)
def _multiplicative_from_spf(limit, spf, phi, mu, dcnt, omega):
    # expo[n]: exponent of spf(n) in n
    expo = np.zeros(limit + 1, dtype=np.uint8)
    phi[1] = 1
    mu[1] = 1
    dcnt[1] = 1
    omega[1] = 0
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        if m % p == 0:
            e = expo[m]
            expo[n] = e + 1
            phi[n] = phi[m] * p
            mu[n] = 0
            dcnt[n] = dcnt[m] // (e + 1) * (e + 2)
            omega[n] = omega[m]
        else:
            expo[n] = 1
            phi[n] = phi[m] * (p - 1)
            mu[n] = -mu[m]
            dcnt[n] = dcnt[m] * 2
            omega[n] = omega[m] + 1


@njit(cache=True)
def _segment_kernel(lo, hi, base_primes, phi, mu, dcnt, omega):
    size = hi - lo + 1
    rem = np.empty(size, dtype=np.int64)
    for i in range(size):
        rem[i] = lo + i
        phi[i] = 1
        mu[i] = 1
        dcnt[i] = 1
        omega[i] = 0
    for k in range(base_primes.shape[0]):
        p = np.int64(base_primes[k])
        if p * p > hi:
            break
        start = ((lo + p - 1) // p) * p
        for m in range(start, hi + 1, p):
            i = m - lo
            r = rem[i] // p
            e = 1
            pk = np.int64(1)
            while r % p == 0:
                r //= p
                e += 1
                pk *= p
            rem[i] = r
            phi[i] *= (p - 1) * pk
            dcnt[i] *= e + 1
            omega[i] += 1
            if e > 1:
                mu[i] = 0
            else:
                mu[i] = -mu[i]
    for i in range(size):
        r = rem[i]
        if r > 1:
            phi[i] *= r - 1
            dcnt[i] *= 2
            omega[i] += 1
            mu[i] = -mu[i]


# -- public API ----------------------------------------------------------


def _check_functions(functions) -> frozenset:
    if functions is None:
        return ALL_FUNCTIONS
    fs = frozenset(FunctionId.parse(f) for f in functions)
    if not fs:
        raise ValueError("at least one function must be requested")
    return fs


def smallest_prime_factors(limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Linear sieve; returns ``(spf, primes)`` with ``spf`` indexed by n."""
    spf = np.zeros(limit + 1, dtype=_spf_dtype(limit))
    # pi(x) < 1.26 x / log x for x > 1
    cap = int(1.3 * limit / math.log(limit)) + 10 if limit >= 2 else 1
    primes = np.zeros(cap, dtype=spf.dtype)
    count = _linear_sieve(limit, spf, primes)
    return spf, primes[:count].copy()


def build_table(limit: int, functions: Iterable = None, *,
                cap: int = DEFAULT_MATERIALIZATION_CAP) -> SieveTable:
    """Materialize phi, mu, d, omega (any subset) and spf over ``1..limit``.

    Raises:
        ValueError: ``limit < 1``.
        CapacityError: ``limit > cap``; use :func:`stream_segments` instead.
    """
    limit = int(limit)
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if limit > cap:
        raise CapacityError(
            f"limit {limit} exceeds the materialization cap {cap}; "
            "use stream_segments (streaming mode) for larger ranges")
    fs = _check_functions(functions)
    spf, _ = smallest_prime_factors(limit)
    phi = np.zeros(limit + 1, dtype=np.int64)
    mu = np.zeros(limit + 1, dtype=np.int8)
    dcnt = np.zeros(limit + 1, dtype=np.int32)
    omega = np.zeros(limit + 1, dtype=np.uint8)
    _multiplicative_from_spf(limit, spf, phi, mu, dcnt, omega)
    raw = {FunctionId.PHI: phi, FunctionId.MU: mu,
           FunctionId.DIVISOR_COUNT: dcnt, FunctionId.OMEGA: omega}
    values = {}
    for f in sorted(fs):
        arr = raw[f][1:].astype(storage_dtype(f, limit))
        arr.flags.writeable = False
        values[f] = arr
    spf.flags.writeable = False
    return SieveTable(limit, spf, values)


def iter_segments(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                  functions: Iterable = None, *, start: int = 1) -> Iterator[Segment]:
    """Yield consecutive segments covering ``start..limit`` in ascending order."""
    limit, segment_size = int(limit), int(segment_size)
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if segment_size < 1:
        raise ValueError(f"segment_size must be >= 1, got {segment_size}")
    if not 1 <= start <= limit:
        raise ValueError(f"start must lie in 1..{limit}")
    fs = _check_functions(functions)
    base = primes_up_to(math.isqrt(limit))
    dtypes = {f: storage_dtype(f, limit) for f in fs}
    size = min(segment_size, limit - start + 1)
    phi = np.empty(size, dtype=np.int64)
    mu = np.empty(size, dtype=np.int8)
    dcnt = np.empty(size, dtype=np.int32)
    omega = np.empty(size, dtype=np.uint8)
    raw = {FunctionId.PHI: phi, FunctionId.MU: mu,
           FunctionId.DIVISOR_COUNT: dcnt, FunctionId.OMEGA: omega}
    lo = start
    while lo <= limit:
        hi = min(lo + segment_size - 1, limit)
        k = hi - lo + 1
        _segment_kernel(lo, hi, base, phi[:k], mu[:k], dcnt[:k], omega[:k])
        values = {}
        for f in sorted(fs):
            arr = raw[f][:k].astype(dtypes[f])
            arr.flags.writeable = False
            values[f] = arr
        yield Segment(lo, hi, values)
        lo = hi + 1


def stream_segments(limit: int, segment_size: int, functions: Iterable,
                    consumer: Callable[[Segment], None]) -> None:
    """Deliver segments covering ``1..limit`` exactly once, ascending, to ``consumer``."""
    for seg in iter_segments(limit, segment_size, functions):
        consumer(seg)


@lru_cache(maxsize=8)
def _primes_cached(P: int) -> np.ndarray:
    if P < 2:
        out = np.zeros(0, dtype=np.int64)
    else:
        is_p = np.ones(P + 1, dtype=bool)
        is_p[:2] = False
        is_p[4::2] = False
        for i in range(3, math.isqrt(P) + 1, 2):
            if is_p[i]:
                is_p[i * i::2 * i] = False
        out = np.flatnonzero(is_p).astype(np.int64)
    out.flags.writeable = False
    return out


def primes_up_to(P: int) -> np.ndarray:
    """Ascending primes in ``[2, P]`` as a read-only int64 array."""
    P = int(P)
    if P < 0:
        raise ValueError(f"P must be >= 0, got {P}")
    return _primes_cached(P)


def factorize(n: int) -> dict:
    """Trial-division factorization ``{p: e}``; ``factorize(1) == {}``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p, step = 5, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += step
        step = 6 - step
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def brute_oracle(n: int, f) -> int:
    """Evaluate ``f(n)`` by trial division alone (no sieve state)."""
    n = int(n)
    f = FunctionId.parse(f)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    fac = factorize(n)
    if f is FunctionId.PHI:
        out = 1
        for p, e in fac.items():
            out *= (p - 1) * p ** (e - 1)
        return out
    if f is FunctionId.MU:
        if any(e > 1 for e in fac.values()):
            return 0
        return -1 if len(fac) % 2 else 1
    if f is FunctionId.DIVISOR_COUNT:
        return math.prod(e + 1 for e in fac.values())
    return len(fac)


# -- binary dump ---------------------------------------------------------

MAGIC = b"NORD1"
_SPF_BIT = 1 << 4
_HEADER = struct.Struct("<5sQB")
_WIDTH_CODES = {
    np.dtype(np.int8): b"i1", np.dtype(np.uint8): b"u1", np.dtype(np.uint16): b"u2",
    np.dtype(np.uint32): b"u4", np.dtype(np.uint64): b"u8",
    np.dtype(np.int32): b"i4", np.dtype(np.int64): b"i8",
}


def dump_table(table: SieveTable, path, *, include_spf: bool = True) -> Path:
    """Write ``table`` in the NORD1 layout (see README, "Binary table dump")."""
    path = Path(path)
    bitmap = 0
    for f in table.values:
        bitmap |= 1 << int(f)
    if include_spf:
        bitmap |= _SPF_BIT
    arrays = [table.values[f] for f in sorted(table.values)]
    if include_spf:
        arrays.append(table.spf)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, table.limit, bitmap))
        for arr in arrays:
            fh.write(_WIDTH_CODES[arr.dtype])
        for arr in arrays:
            fh.write(np.ascontiguousarray(arr).astype(arr.dtype.newbyteorder("<")).tobytes())
    return path


def load_table(path) -> SieveTable:
    """Inverse of :func:`dump_table`; a table without spf gets it recomputed."""
    data = Path(path).read_bytes()
    magic, limit, bitmap = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a NORD1 table (magic {magic!r})")
    fs = [f for f in FunctionId if bitmap & (1 << int(f))]
    has_spf = bool(bitmap & _SPF_BIT)
    n_arrays = len(fs) + has_spf
    off = _HEADER.size
    codes = [data[off + 2 * i: off + 2 * i + 2].decode() for i in range(n_arrays)]
    off += 2 * n_arrays
    arrays = []
    for i, code in enumerate(codes):
        dt = np.dtype("<" + code)
        length = limit + 1 if (has_spf and i == n_arrays - 1) else limit
        nbytes = length * dt.itemsize
        if off + nbytes > len(data):
            raise ValueError(f"{path}: truncated NORD1 payload")
        arr = np.frombuffer(data, dtype=dt, count=length, offset=off).astype(dt.newbyteorder("="))
        arr.flags.writeable = False
        arrays.append(arr)
        off += nbytes
    if off != len(data):
        raise ValueError(f"{path}: {len(data) - off} trailing bytes after NORD1 payload")
    values = dict(zip(fs, arrays))
    spf = arrays[-1] if has_spf else smallest_prime_factors(limit)[0]
    return SieveTable(limit, spf, values)
