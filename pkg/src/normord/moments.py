"""Exact checkpointed moment sums and their remainders against main terms.

Sums are accumulated in Python integers. Inside a block the work is done in
``uint64`` after splitting every operand into 16-bit halves, so each partial
product is below ``2**32`` and a block of up to ``2**31`` terms cannot wrap.
That requires operands below ``2**32``; larger values raise
:class:`~normord.errors.PrecisionError` unless ``arbitrary_precision=True``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from decimal import Context
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import PrecisionError
from .interval import Interval, frac_to_decimal
from .sieve import (DEFAULT_MATERIALIZATION_CAP, DEFAULT_SEGMENT_SIZE, FunctionId,
                    SieveTable, build_table, iter_segments)

WORD_LIMIT = 1 << 32
_BLOCK = 1 << 20


class MomentKind(enum.Enum):
    FIRST = "first"
    SECOND = "second"
    WEIGHTED_FIRST = "weighted_first"

    @classmethod
    def parse(cls, v) -> MomentKind:
        if isinstance(v, cls):
            return v
        return cls(str(v).strip().lower())


@dataclass(frozen=True)
class MomentSeries:
    function: FunctionId
    kind: MomentKind
    checkpoints: tuple  # ((x, exact int sum), ...)

    @property
    def xs(self) -> list[int]:
        return [x for x, _ in self.checkpoints]

    @property
    def sums(self) -> list[int]:
        return [s for _, s in self.checkpoints]

    @property
    def limit(self) -> int:
        return self.checkpoints[-1][0]

    def at(self, x: int) -> int:
        for cx, s in self.checkpoints:
            if cx == x:
                return s
        raise KeyError(f"x={x} is not a checkpoint")


# -- checkpoint schedules -------------------------------------------------


DEFAULT_RATIO = 10 ** 0.25
DEFAULT_START = 1000


def _iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for integers n >= 0."""
    if n < 2:
        return n
    r = int(round(math.exp(math.log(n) / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def checkpoint_schedule(limit: int, ratio: float = DEFAULT_RATIO,
                        start: int = DEFAULT_START) -> list[int]:
    """Geometric checkpoints ``start * ratio**k`` up to ``limit``, plus ``limit``.

    When ``ratio == 10**(1/q)`` for an integer ``q`` the points are exact
    integer roots, ``floor(start * 10**(k/q))``, so they never depend on
    floating-point pow.
    """
    limit, start = int(limit), int(start)
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    if ratio <= 1:
        raise ValueError(f"ratio must exceed 1, got {ratio}")
    if start < 1:
        raise ValueError(f"start must be >= 1, got {start}")
    q = 1 / math.log10(ratio)
    pts = []
    k = 0
    while True:
        if abs(q - round(q)) < 1e-9:
            qi = round(q)
            x = _iroot(start**qi * 10**k, qi)
        else:
            x = math.floor(start * ratio**k + 1e-9)
        if x > limit:
            break
        if not pts or x > pts[-1]:
            pts.append(x)
        k += 1
    if not pts or pts[-1] != limit:
        pts.append(limit)
    return pts


def _validate_schedule(limit: int, schedule) -> list[int]:
    pts = list(schedule) if schedule is not None else checkpoint_schedule(limit)
    pts = [int(x) for x in pts]
    if not pts or pts[-1] != limit:
        raise ValueError("schedule must end at limit")
    if pts[0] < 1 or any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("schedule must be strictly ascending positive integers")
    return pts


# -- exact block sums -----------------------------------------------------


def exact_sum(a: np.ndarray) -> int:
    """Exact sum of a nonnegative integer array with entries below 2**32."""
    if a.size == 0:
        return 0
    total = 0
    a = a.astype(np.uint64, copy=False)
    for i in range(0, a.size, 1 << 31):
        total += int(a[i:i + (1 << 31)].sum(dtype=np.uint64))
    return total


def exact_dot(a: np.ndarray, b: np.ndarray) -> int:
    """Exact ``sum(a * b)`` for nonnegative integer arrays with entries below 2**32."""
    if a.size == 0:
        return 0
    total = 0
    a = a.astype(np.uint64, copy=False)
    b = b.astype(np.uint64, copy=False)
    mask = np.uint64(0xFFFF)
    sh = np.uint64(16)
    for i in range(0, a.size, _BLOCK):
        x, y = a[i:i + _BLOCK], b[i:i + _BLOCK]
        xh, xl = x >> sh, x & mask
        yh, yl = y >> sh, y & mask
        hh = int((xh * yh).sum(dtype=np.uint64))
        mid = int((xh * yl).sum(dtype=np.uint64)) + int((xl * yh).sum(dtype=np.uint64))
        ll = int((xl * yl).sum(dtype=np.uint64))
        total += (hh << 32) + (mid << 16) + ll
    return total


def _block_moment(kind: MomentKind, lo: int, vals: np.ndarray, arbitrary: bool) -> int:
    if arbitrary:
        v = [int(t) for t in vals]
        if kind is MomentKind.FIRST:
            return sum(v)
        if kind is MomentKind.SECOND:
            return sum(t * t for t in v)
        return sum((lo + i) * t for i, t in enumerate(v))
    if kind is MomentKind.FIRST:
        return exact_sum(vals)
    if kind is MomentKind.SECOND:
        return exact_dot(vals, vals)
    ns = np.arange(lo, lo + vals.size, dtype=np.uint64)
    return exact_dot(ns, vals)


def _check_width(f: FunctionId, limit: int, arbitrary: bool) -> None:
    if f is FunctionId.MU:
        raise ValueError("moment sums need a nonnegative function; mu is signed")
    if arbitrary:
        return
    bound = limit if f is FunctionId.PHI else 2 * math.isqrt(limit)
    if max(bound, limit) >= WORD_LIMIT:
        raise PrecisionError(
            f"values or indices up to {limit} exceed the 32-bit split-word range; "
            "pass arbitrary_precision=True")


class _Accumulator:
    """Feeds ascending blocks and records exact sums at checkpoints."""

    def __init__(self, kinds, schedule, arbitrary):
        self.kinds = list(kinds)
        self.schedule = schedule
        self.arbitrary = arbitrary
        self.totals = {k: 0 for k in self.kinds}
        self.out = {k: [] for k in self.kinds}
        self.next_cp = 0
        self.upto = 0

    def feed(self, lo: int, vals: np.ndarray) -> None:
        if lo != self.upto + 1:
            raise ValueError("blocks must be contiguous and ascending")
        hi = lo + vals.size - 1
        pos = lo
        while pos <= hi:
            stop = hi
            if self.next_cp < len(self.schedule):
                stop = min(hi, self.schedule[self.next_cp])
            chunk = vals[pos - lo: stop - lo + 1]
            for k in self.kinds:
                self.totals[k] += _block_moment(k, pos, chunk, self.arbitrary)
            if self.next_cp < len(self.schedule) and stop == self.schedule[self.next_cp]:
                for k in self.kinds:
                    self.out[k].append((stop, self.totals[k]))
                self.next_cp += 1
            pos = stop + 1
        self.upto = hi


def moment_sums(f, kinds: Iterable, limit: int, schedule: Sequence[int] = None, *,
                table: SieveTable = None, mode: str = "auto",
                segment_size: int = DEFAULT_SEGMENT_SIZE,
                cap: int = DEFAULT_MATERIALIZATION_CAP,
                arbitrary_precision: bool = False) -> dict:
    """Several moment series of one function from a single pass.

    ``mode`` is ``"table"`` (materialize, or reuse ``table``), ``"stream"``
    (segmented, O(segment_size) memory) or ``"auto"`` (table when given or
    when ``limit <= cap``, else stream). Both modes give identical sums.
    """
    f = FunctionId.parse(f)
    kinds = [MomentKind.parse(k) for k in kinds]
    limit = int(limit)
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    pts = _validate_schedule(limit, schedule)
    _check_width(f, limit, arbitrary_precision)
    if mode == "auto":
        mode = "table" if table is not None or limit <= cap else "stream"
    acc = _Accumulator(kinds, pts, arbitrary_precision)
    if mode == "table":
        if table is None or table.limit < limit or f not in table.values:
            table = build_table(limit, {f}, cap=cap)
        vals = table.values[f][:limit]
        for i in range(0, limit, _BLOCK):
            acc.feed(i + 1, vals[i:i + _BLOCK])
    elif mode == "stream":
        for seg in iter_segments(limit, segment_size, {f}):
            acc.feed(seg.lo, seg.values[f])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return {k: MomentSeries(f, k, tuple(acc.out[k])) for k in kinds}


def moment_sum(f, kind, limit: int, schedule: Sequence[int] = None, **kw) -> MomentSeries:
    """Exact checkpointed sums of ``f(n)``, ``f(n)**2`` or ``n*f(n)`` over ``n <= x``.

    >>> moment_sum("phi", "first", 10, [10]).at(10)
    32
    """
    kind = MomentKind.parse(kind)
    return moment_sums(f, [kind], limit, schedule, **kw)[kind]


def hyperbola_divisor_sum(limit: int) -> int:
    """``sum_{n <= limit} d(n)`` by the Dirichlet hyperbola method, O(sqrt(limit))."""
    limit = int(limit)
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    r = math.isqrt(limit)
    return 2 * sum(limit // k for k in range(1, r + 1)) - r * r


# -- remainders -----------------------------------------------------------


_LN_CTX = Context(prec=60)
# relative slack covering the 60-digit logarithm
_LN_SLACK = Fraction(1, 10**50)


def _log_interval(x: int) -> Interval:
    v = Fraction(_LN_CTX.ln(x))
    return Interval(v * (1 - _LN_SLACK), v * (1 + _LN_SLACK))


@dataclass(frozen=True)
class Prediction:
    """Main term ``constant * shape(x)`` and error envelope for one moment kind."""

    name: str
    kind: MomentKind | None
    description: str
    envelope_label: str

    def shape(self, x: int) -> Interval:
        if self.name == "mertens":
            return Interval.point(Fraction(x * x, 2))
        if self.name == "segal":
            return Interval.point(Fraction(x**3, 3))
        if self.name == "weighted":
            return Interval.point(Fraction(x**3, 3))
        if self.name == "divisor_first":
            return x * _log_interval(x)
        if self.name == "divisor_second":
            lg = _log_interval(x)
            return x * lg * lg * lg
        return Interval.point(0)

    def envelope(self, x: int, kind: MomentKind) -> float:
        lbl = self.envelope_label if self.kind is not None else _DEFAULT_ENVELOPE[kind]
        lx = math.log(x)
        return {
            "x log x": x * lx,
            "x^2 log^2 x": x * x * lx * lx,
            "x^2 log x": x * x * lx,
            "x log^3 x": x * lx**3,
        }[lbl]


_DEFAULT_ENVELOPE = {
    MomentKind.FIRST: "x log x",
    MomentKind.SECOND: "x^2 log^2 x",
    MomentKind.WEIGHTED_FIRST: "x^2 log x",
}

PREDICTIONS = {
    p.name: p for p in (
        Prediction("mertens", MomentKind.FIRST, "A x^2 / 2", "x log x"),
        Prediction("segal", MomentKind.SECOND, "B x^3 / 3", "x^2 log^2 x"),
        Prediction("weighted", MomentKind.WEIGHTED_FIRST, "A x^3 / 3", "x^2 log x"),
        Prediction("divisor_first", MomentKind.FIRST, "c x log x", "x log x"),
        Prediction("divisor_second", MomentKind.SECOND, "c x log^3 x", "x log^3 x"),
        Prediction("zero", None, "0", ""),
    )
}


@dataclass(frozen=True)
class RemainderPoint:
    x: int
    sum: int
    prediction: Interval
    remainder: Interval
    envelope: float
    normalized: float
    normalized_bounds: tuple

    @property
    def sign_resolved(self) -> bool:
        return self.remainder.sign_resolved


@dataclass(frozen=True)
class RemainderProfile:
    series: MomentSeries
    prediction: str
    constant: Interval
    checkpoints: tuple

    @property
    def unresolved(self) -> list[int]:
        return [p.x for p in self.checkpoints if not p.sign_resolved]

    def sup_normalized(self, lo: int = 1, hi: int = None, *, bound: str = "mid") -> float:
        """Largest ``|normalized remainder|`` over checkpoints in ``[lo, hi]``.

        ``bound="mid"`` uses the enclosure midpoints. ``"upper"`` takes the
        worst endpoint of each normalized enclosure and ``"lower"`` the
        smallest magnitude it can have, so ``lower <= true sup <= upper``.
        """
        vals = []
        for p in self.checkpoints:
            if p.x < lo or (hi is not None and p.x > hi) or p.envelope <= 0:
                continue
            a, b = p.normalized_bounds
            if bound == "upper":
                vals.append(max(abs(a), abs(b)))
            elif bound == "lower":
                vals.append(0.0 if a <= 0 <= b else min(abs(a), abs(b)))
            elif bound == "mid":
                vals.append(abs(p.normalized))
            else:
                raise ValueError(f"unknown bound {bound!r}")
        if not vals:
            raise ValueError(f"no checkpoints in [{lo}, {hi}]")
        return max(vals)

    def to_json(self) -> dict:
        pred = PREDICTIONS[self.prediction]
        return {
            "analysis_type": "remainder_profile",
            "function": self.series.function.name,
            "parameters": {"kind": self.series.kind.value, "prediction": self.prediction,
                           "main_term": pred.description,
                           "envelope": pred.envelope_label or _DEFAULT_ENVELOPE[self.series.kind],
                           "constant": self.constant},
            "checkpoints": [{"x": p.x, "sum": p.sum, "prediction": p.prediction.midpoint,
                             "remainder": p.remainder, "normalized_remainder": p.normalized,
                             "sign_resolved": p.sign_resolved} for p in self.checkpoints],
            "notes": [f"unresolved remainder sign at x = {x}" for x in self.unresolved],
        }

    def csv_rows(self) -> list[list[str]]:
        rows = [["x", "sum", "prediction", "remainder", "normalized_remainder"]]
        for p in self.checkpoints:
            rows.append([
                str(p.x), str(p.sum),
                frac_to_decimal(p.prediction.midpoint),
                frac_to_decimal(p.remainder.midpoint),
                "nan" if p.envelope <= 0 else frac_to_decimal(Fraction(p.normalized)),
            ])
        return rows

    def write_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(self.csv_rows())
        return path


def _as_constant(constant) -> Interval:
    if constant is None:
        return Interval.point(0)
    if isinstance(constant, Interval):
        return constant
    enc = getattr(constant, "enclosure", None)
    if isinstance(enc, Interval):
        return enc
    return Interval.point(constant)


def remainder_profile(series: MomentSeries, prediction: str = "mertens",
                      constant=None) -> RemainderProfile:
    """Exact remainder ``sum - constant * shape(x)`` at every checkpoint.

    ``constant`` is an :class:`Interval`, anything with an ``enclosure``
    attribute (an Euler-product constant), a number, or ``None`` (zero). The
    remainder is an exact rational interval; only the division by the
    floating-point envelope rounds (relative error ~1e-16). Checkpoints where
    the interval straddles zero are listed in :attr:`RemainderProfile.unresolved`.
    """
    try:
        pred = PREDICTIONS[prediction]
    except KeyError:
        raise ValueError(f"unknown prediction {prediction!r}; choose from {sorted(PREDICTIONS)}")
    if pred.kind is not None and pred.kind is not series.kind:
        raise ValueError(f"prediction {prediction!r} applies to {pred.kind.value} moments, "
                         f"not {series.kind.value}")
    c = _as_constant(constant)
    pts = []
    for x, s in series.checkpoints:
        main = c * pred.shape(x)
        rem = Interval.point(s) - main
        env = pred.envelope(x, series.kind) if x > 1 else 0.0
        if env > 0:
            norm = float(rem.midpoint) / env
            nb = (float(rem.lo) / env, float(rem.hi) / env)
        else:
            norm, nb = math.nan, (math.nan, math.nan)
        pts.append(RemainderPoint(x, s, main, rem, env, norm, nb))
    return RemainderProfile(series, prediction, c, tuple(pts))
