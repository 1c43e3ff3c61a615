"""Numerical evidence about normal orders.

For a function in class M (``0 <= psi(n) < C n`` with first and second
moments ``~ A x^2 / 2`` and ``~ B x^3 / 3``), ``A**2 < B`` rules out a normal
order. This module estimates A and B from exact moment sums, issues the
certified verdict, and measures what a failed normal order looks like for
the linear candidates ``f(n) = c n``: the centered second moment, the density
of exceptional ``n``, and, for contrast, Turán's concentration statistic for
``omega(n)`` around ``log log n``.

Only linear candidates are examined; see :data:`LINEAR_FAMILY_NOTE`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import FitQualityError
from .euler import criterion_margin
from .interval import Interval
from .moments import MomentKind, MomentSeries, checkpoint_schedule, moment_sums
from .sieve import (DEFAULT_MATERIALIZATION_CAP, DEFAULT_SEGMENT_SIZE, FunctionId, SieveTable,
                    build_table, iter_segments)

NO_NORMAL_ORDER_CERTIFIED = "NO_NORMAL_ORDER_CERTIFIED"
UNRESOLVED = "UNRESOLVED"

LINEAR_FAMILY_NOTE = (
    "Candidate normal orders are restricted to the linear family f(n) = c*n; "
    "no statement is made about other increasing candidates.")
INCREASING_NOTE = (
    "The assumption that a normal order is increasing is not used beyond the linear family.")

SLOPE_BITS = 64


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _enclosure(c) -> Interval:
    return c if isinstance(c, Interval) else c.enclosure


def certified_slope(constant, bits: int = SLOPE_BITS) -> Fraction:
    """Enclosure midpoint snapped to the grid ``2**-bits``; stays inside the enclosure."""
    enc = _enclosure(constant)
    scale = 1 << bits
    c = Fraction(round(enc.midpoint * scale), scale)
    if not enc.contains(c):
        # enclosure narrower than the grid: fall back to the exact midpoint
        c = enc.midpoint
    return c


def _table_for(function: FunctionId, limit: int, table: SieveTable | None) -> SieveTable:
    if table is not None and table.limit >= limit and function in table.values:
        return table
    return build_table(limit, {function}, cap=max(DEFAULT_MATERIALIZATION_CAP, limit))


# -- constants and verdict ----------------------------------------------


@dataclass(frozen=True)
class ConstantEstimates:
    function: FunctionId
    A_hat: tuple  # ((x, Fraction), ...)
    B_hat: tuple

    def at(self, x: int) -> tuple[Fraction, Fraction]:
        a = dict(self.A_hat)[x]
        b = dict(self.B_hat)[x]
        return a, b


def estimate_moment_constants(s1: MomentSeries, s2: MomentSeries) -> ConstantEstimates:
    """``A_hat(x) = 2 S1(x) / x^2`` and ``B_hat(x) = 3 S2(x) / x^3`` at shared checkpoints."""
    if s1.function is not s2.function:
        raise ValueError(f"series are for different functions: {s1.function.name} vs {s2.function.name}")
    if s1.kind is not MomentKind.FIRST or s2.kind is not MomentKind.SECOND:
        raise ValueError("need a FIRST and a SECOND moment series")
    second = dict(s2.checkpoints)
    a_hat, b_hat = [], []
    for x, s in s1.checkpoints:
        if x in second:
            a_hat.append((x, Fraction(2 * s, x * x)))
            b_hat.append((x, Fraction(3 * second[x], x**3)))
    if not a_hat:
        raise ValueError("series share no checkpoints")
    return ConstantEstimates(s1.function, tuple(a_hat), tuple(b_hat))


@dataclass(frozen=True)
class ClassMReport:
    function: FunctionId
    C: Fraction
    A_certified: Interval
    B_certified: Interval
    margin: Interval
    scan_limit: int
    bound_violations: int
    first_violation: int | None
    estimates: ConstantEstimates | None
    verdict: str
    notes: tuple = (LINEAR_FAMILY_NOTE,)

    @property
    def class_m_bound_ok(self) -> bool:
        return self.bound_violations == 0

    def to_json(self) -> dict:
        cps = []
        if self.estimates is not None:
            for (x, a), (_, b) in zip(self.estimates.A_hat, self.estimates.B_hat):
                cps.append({"x": x, "A_hat": a, "B_hat": b})
        return {
            "analysis_type": "class_m_verdict",
            "function": self.function.name,
            "parameters": {"C": self.C, "scan_limit": self.scan_limit},
            "A_certified": self.A_certified,
            "B_certified": self.B_certified,
            "criterion_margin": self.margin,
            "class_m_bound_ok": self.class_m_bound_ok,
            "bound_violations": self.bound_violations,
            "first_violation": self.first_violation,
            "checkpoints": cps,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def bound_scan(values: np.ndarray, C: Fraction) -> tuple[int, int | None]:
    """Count ``n`` violating ``0 <= psi(n) < C n`` (strict); return (count, first n)."""
    C = _frac(C)
    n = np.arange(1, values.size + 1, dtype=np.int64)
    num, den = C.numerator, C.denominator
    vmax = int(np.abs(values.astype(np.int64)).max()) if values.size else 0
    if den * max(vmax, 1) < 2**62 and num * values.size < 2**62:
        v = values.astype(np.int64)
        bad = (v < 0) | (v * den >= n * num)
    else:
        v = values.astype(object)
        bad = np.array([(int(a) < 0) or (int(a) * den >= int(k) * num) for a, k in zip(v, n)], dtype=bool)
    idx = np.flatnonzero(bad)
    return int(idx.size), (int(idx[0]) + 1 if idx.size else None)


def class_m_verdict(function, C, a_certified, b_certified, estimates: ConstantEstimates = None, *,
                    table: SieveTable = None, scan_limit: int = 10**4) -> ClassMReport:
    """Certified verdict from the Euler-product enclosures plus a class-M bound scan.

    The verdict is :data:`NO_NORMAL_ORDER_CERTIFIED` only if the certified
    interval for ``B - A**2`` is strictly positive and no ``n <= scan_limit``
    violates ``0 <= psi(n) < C n``.
    """
    f = FunctionId.parse(function)
    C = _frac(C)
    if C <= 0:
        raise ValueError("C must be positive")
    if table is not None and f in table.values:
        scan_limit = table.limit
    tb = _table_for(f, scan_limit, table)
    count, first = bound_scan(tb.values[f][:scan_limit], C)
    margin = criterion_margin(a_certified, b_certified)
    ok = margin.certified_positive and count == 0
    notes = [LINEAR_FAMILY_NOTE]
    if count:
        notes.append(f"class-M bound psi(n) < {C}*n violated at {count} n <= {scan_limit} (first n = {first})")
    if not margin.certified_positive:
        notes.append("criterion interval for B - A^2 is not strictly positive at this truncation")
    return ClassMReport(f, C, _enclosure(a_certified), _enclosure(b_certified), margin, scan_limit,
                        count, first, estimates, NO_NORMAL_ORDER_CERTIFIED if ok else UNRESOLVED,
                        tuple(notes))


# -- centered variance ----------------------------------------------------


@dataclass(frozen=True)
class VarianceReport:
    function: FunctionId
    slope: Fraction
    checkpoints: tuple  # ((x, exact centered sum, normalized Fraction), ...)

    def normalized_at(self, x: int) -> Fraction:
        for cx, _, v in self.checkpoints:
            if cx == x:
                return v
        raise KeyError(x)

    def to_json(self) -> dict:
        return {
            "analysis_type": "centered_variance",
            "function": self.function.name,
            "parameters": {"slope": self.slope},
            "checkpoints": [{"x": x, "centered_sum": s, "normalized": v} for x, s, v in self.checkpoints],
            "notes": [LINEAR_FAMILY_NOTE],
        }

    def csv_rows(self) -> list:
        from .interval import frac_to_decimal
        rows = [["x", "centered_sum", "normalized_variance"]]
        rows += [[str(x), frac_to_decimal(s), frac_to_decimal(v)] for x, s, v in self.checkpoints]
        return rows


def centered_variance(function, slope, limit: int, schedule: Sequence[int] = None, *,
                      table: SieveTable = None, mode: str = "auto") -> VarianceReport:
    """``(3 / x^3) * sum_{n <= x} (psi(n) - c n)^2`` at each checkpoint, exactly.

    The square is expanded into ``S2 - 2 c W + c^2 sum n^2`` with ``S2`` and
    ``W = sum n psi(n)`` the exact moment sums, so the result is an exact
    rational for rational ``c``.
    """
    f = FunctionId.parse(function)
    c = _frac(slope)
    if c <= 0:
        raise ValueError("slope must be positive")
    sums = moment_sums(f, [MomentKind.SECOND, MomentKind.WEIGHTED_FIRST], limit, schedule,
                       table=table, mode=mode)
    s2 = sums[MomentKind.SECOND].checkpoints
    w = sums[MomentKind.WEIGHTED_FIRST].checkpoints
    out = []
    for (x, a), (_, b) in zip(s2, w):
        sq = Fraction(x * (x + 1) * (2 * x + 1), 6)
        total = a - 2 * c * b + c * c * sq
        out.append((x, total, total * 3 / Fraction(x**3)))
    return VarianceReport(f, c, tuple(out))


def direct_centered_sum(values: Sequence[int], slope, x: int) -> Fraction:
    """Reference path: ``sum_{n <= x} (values[n-1] - c n)^2`` term by term, exactly."""
    c = _frac(slope)
    p, q = c.numerator, c.denominator
    total = 0
    for n in range(1, x + 1):
        t = int(values[n - 1]) * q - p * n
        total += t * t
    return Fraction(total, q * q)


# -- exceptional density -------------------------------------------------


@dataclass(frozen=True)
class DensityReport:
    function: FunctionId
    epsilon: Fraction
    slope: Fraction
    limit: int
    exceptional_count: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.exceptional_count, self.limit)

    def to_json(self) -> dict:
        return {
            "analysis_type": "exceptional_density",
            "function": self.function.name,
            "parameters": {"epsilon": self.epsilon, "slope": self.slope, "limit": self.limit},
            "checkpoints": [{"x": self.limit, "exceptional_count": self.exceptional_count,
                             "density": float(self.density)}],
            "notes": [LINEAR_FAMILY_NOTE, INCREASING_NOTE],
        }


def _exceptional_mask(values: np.ndarray, epsilon: Fraction, c: Fraction) -> np.ndarray:
    # |psi - c n| >= eps c n  <=>  psi >= (1+eps) c n  or  psi <= (1-eps) c n   (c > 0)
    t_hi = (1 + epsilon) * c
    t_lo = (1 - epsilon) * c
    n = np.arange(1, values.size + 1, dtype=np.float64)
    r = values.astype(np.float64) / n
    mask = (r >= float(t_hi)) | (r <= float(t_lo))
    # floats only screen; entries near either threshold are decided exactly
    for t in (t_hi, t_lo):
        tf = float(t)
        near = np.flatnonzero(np.abs(r - tf) <= 1e-12 * max(1.0, abs(tf)))
        for i in near:
            k, v = int(i) + 1, int(values[i])
            hit_hi = v * t_hi.denominator >= t_hi.numerator * k
            hit_lo = v * t_lo.denominator <= t_lo.numerator * k
            mask[i] = hit_hi or hit_lo
    return mask


def exceptional_density(function, epsilon, slope, limit: int, *,
                        table: SieveTable = None) -> DensityReport:
    """Count ``n <= limit`` with ``|psi(n) - c n| >= eps c n``, with exact tie handling."""
    f = FunctionId.parse(function)
    eps, c = _frac(epsilon), _frac(slope)
    if eps <= 0 or c <= 0:
        raise ValueError("epsilon and slope must be positive")
    tb = _table_for(f, limit, table)
    mask = _exceptional_mask(tb.values[f][:limit], eps, c)
    return DensityReport(f, eps, c, int(limit), int(mask.sum()))


def density_profile(function, epsilons, slope, xs: Sequence[int], *,
                    table: SieveTable = None) -> list[DensityReport]:
    """:func:`exceptional_density` for every (epsilon, x) pair from one table pass."""
    f = FunctionId.parse(function)
    c = _frac(slope)
    xs = sorted(int(x) for x in xs)
    tb = _table_for(f, xs[-1], table)
    vals = tb.values[f][:xs[-1]]
    out = []
    for e in epsilons:
        e = _frac(e)
        cum = np.cumsum(_exceptional_mask(vals, e, c), dtype=np.int64)
        out.extend(DensityReport(f, e, c, x, int(cum[x - 1])) for x in xs)
    return out


def _blocks(f: FunctionId, limit: int, table: SieveTable | None, block: int = 1 << 20):
    """``(lo, values)`` blocks over ``1..limit`` from a table, or streamed past the cap."""
    if (table is not None and table.limit >= limit and f in table.values) or limit <= DEFAULT_MATERIALIZATION_CAP:
        vals = _table_for(f, limit, table).values[f][:limit]
        for i in range(0, limit, block):
            yield i + 1, vals[i:i + block]
    else:
        for seg in iter_segments(limit, DEFAULT_SEGMENT_SIZE, {f}):
            yield seg.lo, seg.values[f]


# -- Turán statistic ------------------------------------------------------


@dataclass(frozen=True)
class TuranReport:
    checkpoints: tuple  # ((x, statistic), ...)

    def at(self, x: int) -> float:
        return dict(self.checkpoints)[x]

    def to_json(self) -> dict:
        return {
            "analysis_type": "turan_statistic",
            "function": FunctionId.OMEGA.name,
            "parameters": {"start": 3},
            "checkpoints": [{"x": x, "statistic": s} for x, s in self.checkpoints],
            "notes": ["statistic = sum_{3<=n<=x} (omega(n) - log log n)^2 / (x log log x)"],
        }


def turan_statistic(limit: int, schedule: Sequence[int] = None, *,
                    table: SieveTable = None) -> TuranReport:
    """``sum_{3 <= n <= x} (omega(n) - log log n)^2 / (x log log x)`` per checkpoint."""
    limit = int(limit)
    if limit < 3:
        raise ValueError(f"limit must be >= 3, got {limit}")
    pts = list(schedule) if schedule is not None else checkpoint_schedule(limit)
    if any(x < 3 for x in pts):
        raise ValueError("Turán checkpoints must be >= 3")
    if pts[-1] != limit or any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("schedule must be strictly ascending and end at limit")
    pieces, out = [], []
    cp = iter(pts)
    nxt = next(cp)
    for lo, om in _blocks(FunctionId.OMEGA, limit, table):
        pos = lo
        hi = lo + om.size - 1
        while pos <= hi:
            stop = min(hi, nxt)
            first = max(pos, 3)
            if first <= stop:
                n = np.arange(first, stop + 1, dtype=np.float64)
                w = om[first - lo: stop - lo + 1].astype(np.float64)
                pieces.append(math.fsum(((w - np.log(np.log(n))) ** 2).tolist()))
            if stop == nxt:
                out.append((nxt, math.fsum(pieces) / (nxt * math.log(math.log(nxt)))))
                nxt = next(cp, None)
                if nxt is None:
                    break
            pos = stop + 1
    return TuranReport(tuple(out))


# -- divisor second-moment fit -------------------------------------------


@dataclass(frozen=True)
class DMomentFit:
    coefficients: tuple  # (log^3, log^2, log, 1)
    residual_norm: float
    xs: tuple
    target: float = 1 / math.pi**2

    @property
    def leading(self) -> float:
        return self.coefficients[0]

    @property
    def relative_error(self) -> float:
        return abs(self.leading - self.target) / self.target

    def to_json(self) -> dict:
        return {
            "analysis_type": "d_moment_fit",
            "function": FunctionId.DIVISOR_COUNT.name,
            "parameters": {"basis": ["log^3 x", "log^2 x", "log x", "1"], "x_min": self.xs[0],
                           "x_max": self.xs[-1], "points": len(self.xs)},
            "coefficients": list(self.coefficients),
            "leading": self.leading,
            "target_inverse_pi_squared": self.target,
            "relative_error": self.relative_error,
            "residual_norm": self.residual_norm,
            "checkpoints": [],
            "notes": ["least squares of S2(x)/x on {log^3 x, log^2 x, log x, 1}"],
        }


def d_moment_fit(series, *, min_points: int = 8, min_decades: float = 3.0) -> DMomentFit:
    """Fit ``S2(x) / x`` against ``{log^3 x, log^2 x, log x, 1}`` by QR least squares.

    ``series`` is a :class:`MomentSeries` (SECOND moment of d) or any sequence
    of ``(x, S2(x))`` pairs, which is how synthetic inputs are fed.
    """
    if isinstance(series, MomentSeries):
        if series.kind is not MomentKind.SECOND:
            raise ValueError("d_moment_fit needs a SECOND moment series")
        pairs = series.checkpoints
    else:
        pairs = tuple(series)
    if len(pairs) < min_points:
        raise FitQualityError(f"need >= {min_points} checkpoints, got {len(pairs)}")
    xs = np.array([float(x) for x, _ in pairs])
    span = math.log10(xs.max() / xs.min())
    if span < min_decades:
        raise FitQualityError(f"checkpoints span {span:.2f} decades; need >= {min_decades}")
    y = np.array([float(Fraction(s) / x) if not isinstance(s, float) else s / x for x, s in pairs])
    lg = np.log(xs)
    M = np.column_stack([lg**3, lg**2, lg, np.ones_like(lg)])
    Q, R = np.linalg.qr(M)
    if np.linalg.cond(R) > 1e12:
        raise FitQualityError("log-polynomial basis is numerically singular on these checkpoints")
    coef = np.linalg.solve(R, Q.T @ y)
    resid = float(np.linalg.norm(M @ coef - y))
    return DMomentFit(tuple(float(v) for v in coef), resid, tuple(int(x) for x, _ in pairs))
