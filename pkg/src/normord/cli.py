"""Command-line verification suites.

    normord --suite constants --prime-limit 10000000
    normord --suite all --out reports/

Every suite writes ``<suite>.json`` (schema ``normord-report/1``) plus CSV
tables into the output directory, and ``index.json`` links them all. The
exit status is 0 iff every assertion of every selected suite passed.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import random
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import analyzer as an
from .errors import FitQualityError
from .euler import DEFAULT_PRECISION, DEFAULT_PRIME_LIMIT, constant_A, constant_B, criterion_margin
from .identities import DEFAULT_IDENTITY_LIMIT, verify_identities
from .interval import Interval, frac_to_decimal
from .moments import (DEFAULT_RATIO, MomentKind, checkpoint_schedule, hyperbola_divisor_sum,
                      moment_sums, remainder_profile)
from .report import SuiteResult, emit_report
from .sieve import (DEFAULT_MATERIALIZATION_CAP, DEFAULT_SEGMENT_SIZE, FunctionId, brute_oracle,
                    build_table, iter_segments, primes_up_to)

log = logging.getLogger("normord")

SUITES = ("sieve-check", "mertens", "segal", "identities", "constants", "verdict",
          "variance", "density", "turan", "divisor-fit")
DEFAULT_EPSILONS = ("0.01", "0.05", "0.1")
DENSITY_XS = (10**4, 10**5, 10**6)
BRUTE_SAMPLE = 1000
MARGIN_FLOOR = Fraction(4, 100)
VARIANCE_BRUTE_LIMIT = 10**5


@dataclass
class RunConfig:
    limit: int = 10**7
    segment_size: int = DEFAULT_SEGMENT_SIZE
    checkpoint_ratio: float = DEFAULT_RATIO
    prime_limit: int = DEFAULT_PRIME_LIMIT
    precision_bits: int = DEFAULT_PRECISION
    epsilons: tuple = DEFAULT_EPSILONS
    out: str = "normord-out"
    suites: tuple = ("all",)

    def __post_init__(self):
        for name in ("limit", "segment_size", "prime_limit", "precision_bits"):
            if int(getattr(self, name)) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.checkpoint_ratio <= 1:
            raise ValueError("checkpoint_ratio must exceed 1")
        if not self.epsilons or any(Fraction(e) <= 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        bad = [s for s in self.suites if s != "all" and s not in SUITES]
        if bad:
            raise ValueError(f"unknown suite(s) {bad}; choose from {SUITES + ('all',)}")

    @property
    def selected(self) -> list[str]:
        if "all" in self.suites:
            return list(SUITES)
        return [s for s in SUITES if s in self.suites]

    def public(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d["epsilons"] = [str(e) for e in self.epsilons]
        d["suites"] = self.selected
        return d


class Workspace:
    """Shared, lazily built inputs for one run (table, constants, series)."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.limit = int(cfg.limit)

    @cached_property
    def schedule(self) -> list[int]:
        return checkpoint_schedule(self.limit, self.cfg.checkpoint_ratio)

    @cached_property
    def table(self):
        if self.limit > DEFAULT_MATERIALIZATION_CAP:
            return None
        return build_table(self.limit)

    def table_upto(self, x: int):
        if self.table is not None and self.table.limit >= x:
            return self.table
        return build_table(min(x, DEFAULT_MATERIALIZATION_CAP))

    @cached_property
    def A(self):
        return constant_A(self.cfg.prime_limit, self.cfg.precision_bits)

    @cached_property
    def B(self):
        return constant_B(self.cfg.prime_limit, self.cfg.precision_bits)

    @cached_property
    def slope(self) -> Fraction:
        return an.certified_slope(self.A)

    @cached_property
    def phi_series(self) -> dict:
        return moment_sums(FunctionId.PHI, list(MomentKind), self.limit, self.schedule,
                           table=self.table, segment_size=self.cfg.segment_size)

    @cached_property
    def d_series(self) -> dict:
        return moment_sums(FunctionId.DIVISOR_COUNT, [MomentKind.FIRST, MomentKind.SECOND],
                           self.limit, self.schedule, table=self.table,
                           segment_size=self.cfg.segment_size)


# -- suites --------------------------------------------------------------


def suite_sieve_check(ws: Workspace) -> SuiteResult:
    res = SuiteResult("sieve-check")
    ex = min(ws.limit, DEFAULT_IDENTITY_LIMIT)
    tb = ws.table_upto(ex)
    mismatches = 0
    for f in FunctionId:
        vals = tb.values[f]
        mismatches += sum(int(vals[n - 1]) != brute_oracle(n, f) for n in range(1, ex + 1))
    res.check("exhaustive_oracle", mismatches == 0, f"n <= {ex}, 4 functions, {mismatches} mismatches")
    if ws.limit > ex and ws.table is not None:
        rng = random.Random(20160613)
        sample = sorted(rng.sample(range(ex + 1, ws.limit + 1), min(BRUTE_SAMPLE, ws.limit - ex)))
        bad = sum(ws.table.at(f, n) != brute_oracle(n, f) for n in sample for f in FunctionId)
        res.check("sampled_oracle", bad == 0, f"{len(sample)} random n <= {ws.limit}, {bad} mismatches")
    if ws.table is not None:
        spf = ws.table.spf
        primes = np.flatnonzero(spf[2:] == np.arange(2, ws.limit + 1)) + 2
        res.check("prime_count", np.array_equal(primes, primes_up_to(ws.limit)),
                  f"pi({ws.limit}) = {primes.size}")
        same = all(
            np.array_equal(seg.values[f], ws.table.values[f][seg.lo - 1: seg.hi])
            for seg in iter_segments(ws.limit, ws.cfg.segment_size) for f in FunctionId)
        res.check("stream_equals_table", same, f"segment size {ws.cfg.segment_size}")
    res.analyses.append({"analysis_type": "sieve_check", "function": "ALL",
                         "parameters": {"exhaustive_limit": ex, "limit": ws.limit},
                         "checkpoints": [], "notes": []})
    return res


def _envelope_stability(res: SuiteResult, prof, name: str) -> None:
    finite = all(math.isfinite(p.normalized) for p in prof.checkpoints if p.envelope > 0)
    res.check(f"{name}_finite_sup", finite, "")
    if prof.series.limit >= 10**7:
        early = prof.sup_normalized(10**3, 10**5, bound="lower")
        late = prof.sup_normalized(10**5, 10**7, bound="upper")
        res.check(f"{name}_envelope_stable", late <= 2 * early,
                  f"sup[1e5,1e7] <= {late:.6g} vs 2 * sup[1e3,1e5] >= {2 * early:.6g}")


def _stream_equality(res: SuiteResult, ws: Workspace, kind: MomentKind) -> None:
    if ws.table is None:
        return
    streamed = moment_sums(FunctionId.PHI, [kind], ws.limit, ws.schedule, mode="stream",
                           segment_size=ws.cfg.segment_size)[kind]
    res.check(f"stream_equals_table_{kind.value}",
              streamed.checkpoints == ws.phi_series[kind].checkpoints, "every checkpoint")


def suite_mertens(ws: Workspace) -> SuiteResult:
    res = SuiteResult("mertens")
    s1 = ws.phi_series[MomentKind.FIRST]
    prof = remainder_profile(s1, "mertens", ws.A)
    res.analyses.append(prof.to_json())
    res.tables["mertens_phi_first.csv"] = prof.csv_rows()
    _envelope_stability(res, prof, "mertens")
    res.check("monotone", all(b >= a for a, b in zip(s1.sums, s1.sums[1:])), "")
    w = remainder_profile(ws.phi_series[MomentKind.WEIGHTED_FIRST], "weighted", ws.A)
    res.analyses.append(w.to_json())
    res.tables["weighted_phi.csv"] = w.csv_rows()
    _stream_equality(res, ws, MomentKind.FIRST)
    return res


def suite_segal(ws: Workspace) -> SuiteResult:
    res = SuiteResult("segal")
    s2 = ws.phi_series[MomentKind.SECOND]
    prof = remainder_profile(s2, "segal", ws.B)
    res.analyses.append(prof.to_json())
    res.tables["segal_phi_second.csv"] = prof.csv_rows()
    _envelope_stability(res, prof, "segal")
    res.check("monotone", all(b >= a for a, b in zip(s2.sums, s2.sums[1:])), "")
    _stream_equality(res, ws, MomentKind.SECOND)
    return res


def suite_identities(ws: Workspace) -> SuiteResult:
    res = SuiteResult("identities")
    lim = min(ws.limit, DEFAULT_IDENTITY_LIMIT)
    rep = verify_identities(lim, ws.table_upto(lim))
    for name in sorted(rep.checked):
        res.check(name, rep.failures[name] == 0,
                  f"{rep.checked[name]} checked, first counterexample "
                  f"{rep.first_counterexample.get(name)}")
    res.analyses.append({"analysis_type": "identity_verification", "function": "PHI",
                         "parameters": {"limit": lim}, "checkpoints": [],
                         "checked": rep.checked, "failures": rep.failures,
                         "first_counterexample": rep.first_counterexample, "notes": []})
    return res


SIX_OVER_PI2 = Interval(Fraction(6 / math.pi**2) - Fraction(1, 2**48),
                        Fraction(6 / math.pi**2) + Fraction(1, 2**48))


def suite_constants(ws: Workspace) -> SuiteResult:
    res = SuiteResult("constants")
    A, B = ws.A, ws.B
    P = ws.cfg.prime_limit
    res.check("A_contains_6_over_pi2", A.enclosure.lo <= SIX_OVER_PI2.lo and SIX_OVER_PI2.hi <= A.enclosure.hi,
              f"A in {A.enclosure}")
    if P >= 10**7:
        res.check("A_width", A.enclosure.width < Fraction(1, 10**6), f"width {float(A.enclosure.width):.3g}")
    records = [A.to_record(), B.to_record()]
    if P // 10 >= 2:
        B_small = constant_B(P // 10, ws.cfg.precision_bits)
        records.append(B_small.to_record())
        res.check("B_enclosures_overlap", B.enclosure.overlaps(B_small.enclosure),
                  f"P = {P // 10} and {P}")
    margin = criterion_margin(A, B)
    res.check("margin_certified_positive", margin.certified_positive, f"B - A^2 in {margin}")
    if P >= 10**7:
        res.check("margin_lower_bound", margin.lo >= MARGIN_FLOOR, f"lower {float(margin.lo):.7f}")
    res.analyses.append({"analysis_type": "euler_constants", "function": "PHI",
                         "parameters": {"prime_limit": P, "precision_bits": ws.cfg.precision_bits},
                         "constants": records, "criterion_margin": margin, "checkpoints": [],
                         "notes": ["tail log-mass bounded by 2/P (A) and 4/P (B)"]})
    rows = [["name", "truncation_prime", "partial", "lo", "hi", "decimal_digits_certified"]]
    rows += [[r["name"], str(r["truncation_prime"]), r["partial"], r["lo"], r["hi"],
              str(r["decimal_digits_certified"])] for r in records]
    res.tables["constants.csv"] = rows
    return res


def suite_verdict(ws: Workspace) -> SuiteResult:
    res = SuiteResult("verdict")
    est = an.estimate_moment_constants(ws.phi_series[MomentKind.FIRST], ws.phi_series[MomentKind.SECOND])
    scan = min(ws.limit, DEFAULT_MATERIALIZATION_CAP)
    rep = an.class_m_verdict(FunctionId.PHI, 2, ws.A, ws.B, est, table=ws.table_upto(scan),
                             scan_limit=scan)
    res.analyses.append(rep.to_json())
    res.check("class_m_bound", rep.class_m_bound_ok, f"0 <= phi(n) < 2n for n <= {rep.scan_limit}")
    res.check("verdict", rep.verdict == an.NO_NORMAL_ORDER_CERTIFIED, rep.verdict)
    rows = [["x", "A_hat", "B_hat"]]
    rows += [[str(x), frac_to_decimal(a), frac_to_decimal(b)]
             for (x, a), (_, b) in zip(est.A_hat, est.B_hat)]
    res.tables["constant_estimates_phi.csv"] = rows
    return res


def suite_variance(ws: Workspace) -> SuiteResult:
    res = SuiteResult("variance")
    rep = an.centered_variance(FunctionId.PHI, ws.slope, ws.limit, ws.schedule, table=ws.table,
                               mode="auto")
    res.analyses.append(rep.to_json())
    res.tables["variance_phi.csv"] = rep.csv_rows()
    res.check("nonnegative", all(v >= 0 for _, _, v in rep.checkpoints), "")
    margin = criterion_margin(ws.A, ws.B)
    final = rep.checkpoints[-1][2]
    if ws.limit >= 10**5:
        res.check("limit_is_B_minus_A2", margin.widen(Fraction(1, 10)).contains(final),
                  f"normalized variance {float(final):.8f} at x = {ws.limit}, B - A^2 in {margin}")
    xb = min(ws.limit, VARIANCE_BRUTE_LIMIT)
    tb = ws.table_upto(xb)
    direct = an.direct_centered_sum(tb.values[FunctionId.PHI], ws.slope, xb)
    expanded = an.centered_variance(FunctionId.PHI, ws.slope, xb, [xb], table=tb).checkpoints[-1][1]
    res.check("direct_sum_agrees", direct == expanded, f"x = {xb}, exact rational equality")
    return res


def suite_density(ws: Workspace) -> SuiteResult:
    res = SuiteResult("density")
    xs = [x for x in DENSITY_XS if x <= ws.limit] or [ws.limit]
    reps = an.density_profile(FunctionId.PHI, ws.cfg.epsilons, ws.slope, xs, table=ws.table_upto(xs[-1]))
    rows = [["epsilon", "x", "exceptional_count", "density"]]
    for r in reps:
        res.analyses.append(r.to_json())
        rows.append([str(r.epsilon), str(r.limit), str(r.exceptional_count), frac_to_decimal(r.density)])
    res.tables["density_phi.csv"] = rows
    res.check("density_in_unit_interval", all(0 <= r.density <= 1 for r in reps), "")
    by_x = {}
    for r in reps:
        by_x.setdefault(r.limit, []).append(r)
    mono = all(a.density >= b.density for rs in by_x.values()
               for a, b in zip(sorted(rs, key=lambda r: r.epsilon), sorted(rs, key=lambda r: r.epsilon)[1:]))
    res.check("monotone_in_epsilon", mono, "")
    five = [r for r in reps if r.epsilon == Fraction(1, 20)]
    if len(five) == len(DENSITY_XS):
        ds = [float(r.density) for r in five]
        res.check("positive_density", min(ds) >= 0.1, f"densities {ds}")
        res.check("stable_density", max(ds) - min(ds) <= 0.02, f"spread {max(ds) - min(ds):.4f}")
    return res


def suite_turan(ws: Workspace) -> SuiteResult:
    res = SuiteResult("turan")
    pts = [x for x in ws.schedule if x >= 3] or [ws.limit]
    rep = an.turan_statistic(ws.limit, pts, table=ws.table)
    res.analyses.append(rep.to_json())
    res.tables["turan_omega.csv"] = [["x", "statistic"]] + [[str(x), repr(s)] for x, s in rep.checkpoints]
    res.check("finite_nonnegative", all(math.isfinite(s) and s >= 0 for _, s in rep.checkpoints), "")
    got = dict(rep.checkpoints)
    big = [got[x] for x in (10**6, 10**7) if x in got]
    if big:
        res.check("bounded_order_one", all(0.3 <= s <= 3 for s in big), f"statistics {big}")
    if len(big) == 2:
        res.check("concentrated", abs(big[1] - big[0]) / min(big) < 0.25, f"statistics {big}")
    return res


def suite_divisor_fit(ws: Workspace) -> SuiteResult:
    res = SuiteResult("divisor-fit")
    s1, s2 = ws.d_series[MomentKind.FIRST], ws.d_series[MomentKind.SECOND]
    hyp = all(hyperbola_divisor_sum(x) == s for x, s in s1.checkpoints)
    res.check("hyperbola_equals_sieve", hyp, f"{len(s1.checkpoints)} checkpoints")
    inv_pi2 = ws.A.enclosure / 6
    for name, series, pred in (("divisor_first", s1, "divisor_first"), ("divisor_second", s2, "divisor_second")):
        prof = remainder_profile(series, pred, 1 if pred == "divisor_first" else inv_pi2)
        res.analyses.append(prof.to_json())
        res.tables[f"{name}.csv"] = prof.csv_rows()
    try:
        fit = an.d_moment_fit(s2)
    except FitQualityError as exc:
        res.analyses.append({"analysis_type": "d_moment_fit", "function": "DIVISOR_COUNT",
                             "parameters": {}, "checkpoints": [], "notes": [f"fit skipped: {exc}"]})
        return res
    res.analyses.append(fit.to_json())
    if ws.limit >= 10**7:
        res.check("leading_coefficient", fit.relative_error <= 0.15,
                  f"leading {fit.leading:.6f} vs 1/pi^2 = {fit.target:.6f}")
    return res


SUITE_FUNCS = {
    "sieve-check": suite_sieve_check, "mertens": suite_mertens, "segal": suite_segal,
    "identities": suite_identities, "constants": suite_constants, "verdict": suite_verdict,
    "variance": suite_variance, "density": suite_density, "turan": suite_turan,
    "divisor-fit": suite_divisor_fit,
}


def run_suite(config: RunConfig, suite: str, workspace: Workspace = None) -> SuiteResult:
    """Run one named suite (not ``all``) and return its result without writing files."""
    if suite not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    return SUITE_FUNCS[suite](workspace or Workspace(config))


def run(config: RunConfig) -> tuple[int, list[SuiteResult]]:
    ws = Workspace(config)
    results = []
    for name in config.selected:
        t0 = time.perf_counter()
        res = run_suite(config, name, ws)
        results.append(res)
        status = "PASS" if res.passed else "FAIL"
        log.info("[%s] %-12s %d checks  %.1fs", status, name, len(res.checks), time.perf_counter() - t0)
        for c in res.failures:
            log.warning("    failed: %s  %s", c.name, c.detail)
    emit_report(results, config.out, config.public())
    return (0 if all(r.passed for r in results) else 1), results


def _int(v: str) -> int:
    # accepts 10000000, 1e7, 10**7
    v = v.strip()
    if "**" in v:
        b, e = v.split("**")
        return int(b) ** int(e)
    f = float(v)
    if f != int(f):
        raise argparse.ArgumentTypeError(f"{v} is not an integer")
    return int(f) if "e" in v.lower() else int(v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="normord", description=__doc__.split("\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--limit", type=_int, default=10**7, help="largest n summed (default 1e7)")
    p.add_argument("--segment-size", type=_int, default=DEFAULT_SEGMENT_SIZE)
    p.add_argument("--checkpoint-ratio", type=float, default=DEFAULT_RATIO,
                   help="geometric checkpoint ratio (default 10**0.25)")
    p.add_argument("--prime-limit", type=_int, default=DEFAULT_PRIME_LIMIT,
                   help="Euler-product truncation P (default 1e7)")
    p.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION)
    p.add_argument("--epsilon", action="append", default=None,
                   help="exceptional-density epsilon, repeatable (default 0.01 0.05 0.1)")
    p.add_argument("--out", default="normord-out", help="output directory (NORMORD_OUT overrides)")
    p.add_argument("--suite", action="append", choices=SUITES + ("all",), default=None,
                   help="suite to run, repeatable (default all)")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        cfg = RunConfig(
            limit=args.limit, segment_size=args.segment_size, checkpoint_ratio=args.checkpoint_ratio,
            prime_limit=args.prime_limit, precision_bits=args.precision_bits,
            epsilons=tuple(args.epsilon or DEFAULT_EPSILONS),
            out=os.environ.get("NORMORD_OUT") or args.out,
            suites=tuple(args.suite or ("all",)))
    except ValueError as exc:
        print(f"normord: {exc}", file=sys.stderr)
        return 2
    try:
        status, results = run(cfg)
    except OSError as exc:
        print(f"normord: {exc}", file=sys.stderr)
        return 3
    failed = [f"{r.suite}:{c.name}" for r in results for c in r.failures]
    if failed:
        print(f"normord: {len(failed)} assertion(s) failed: {', '.join(failed)}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
