"""JSON/CSV emission with byte-stable output.

JSON is written with sorted keys and a fixed indent. Integers beyond the
exactly-representable double range (``2**53``) and all rationals are written
as decimal strings so consumers never round them silently.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .interval import Interval, frac_to_decimal

SCHEMA = "normord-report/1"
JSON_DIGITS = 20
_SAFE_INT = 2**53


def jsonable(v):
    """Convert report values to JSON-safe primitives, deterministically."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, enum.Enum):
        return v.name if isinstance(v, enum.IntEnum) else v.value
    if isinstance(v, int):
        return v if abs(v) < _SAFE_INT else str(v)
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return jsonable(v.numerator)
        return frac_to_decimal(v, JSON_DIGITS)
    if isinstance(v, float):
        return None if not math.isfinite(v) else v
    if isinstance(v, Interval):
        lo, hi = v.decimal_bounds(JSON_DIGITS)
        return {"lo": lo, "hi": hi}
    if isinstance(v, dict):
        return {str(jsonable(k) if not isinstance(k, str) else k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if hasattr(v, "item"):  # numpy scalar
        return jsonable(v.item())
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    try:
        path.write_text(dumps(obj))
    except OSError as exc:
        raise OSError(f"cannot write report {path}: {exc}") from exc
    return path


def write_csv(rows, path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write CSV {path}: {exc}") from exc
    return path


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    """Outcome of one suite: analyses (JSON dicts), CSV tables and assertions."""

    suite: str
    analyses: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)  # filename -> rows
    checks: list = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]


def emit_report(results, out_dir, config: dict = None) -> Path:
    """Write one JSON per suite, every CSV table, and ``index.json``.

    Returns the index path. Row and key ordering are fixed, so identical
    inputs give byte-identical files.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    files, index_analyses = [], []
    for res in results:
        suite_file = f"{res.suite}.json"
        csv_files = []
        for name in sorted(res.tables):
            write_csv(res.tables[name], out / name)
            csv_files.append(name)
        write_json({
            "schema": SCHEMA,
            "suite": res.suite,
            "passed": res.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in res.checks],
            "analyses": res.analyses,
            "csv": csv_files,
        }, out / suite_file)
        files.append(suite_file)
        files.extend(csv_files)
        for a in res.analyses:
            index_analyses.append({"suite": res.suite, "analysis_type": a.get("analysis_type"),
                                   "file": suite_file})
    index = {
        "schema": SCHEMA,
        "config": config or {},
        "passed": all(r.passed for r in results),
        "suites": [{"suite": r.suite, "passed": r.passed, "failures": [c.name for c in r.failures]}
                   for r in results],
        "analyses": index_analyses,
        "files": files,
    }
    return write_json(index, out / "index.json")
