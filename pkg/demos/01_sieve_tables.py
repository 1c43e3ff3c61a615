"""
Tabulating multiplicative functions with a linear sieve
=======================================================

One pass over 1..N records the smallest prime factor of every n, and
phi, mu, d and omega follow from it. The table can be saved to a small
binary file and read back.
"""

import tempfile
from pathlib import Path

from normord import FunctionId, build_table, dump_table, iter_segments, load_table
from normord.sieve import factorize

N = 10**6
table = build_table(N)

for n in (1, 12, 360, 997, 999_999):
    row = {f.name.lower(): table.at(f, n) for f in FunctionId}
    print(n, factorize(n), row)

# the same values come out of the segmented stream, block by block
seg = next(iter_segments(N, segment_size=1 << 16, start=500_001))
print("segment", seg.lo, seg.hi, "phi(500001) =", int(seg.values[FunctionId.PHI][0]))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "table.nord"
    dump_table(table, path)
    back = load_table(path)
    print("dump size", path.stat().st_size, "bytes; round trip ok:",
          all((back[f] == table[f]).all() for f in FunctionId))
