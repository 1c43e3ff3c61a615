"""
A function that does have a normal order
=========================================

omega(n) concentrates around log log n: the Turan statistic
sum (omega(n) - log log n)^2 / (x log log x) stays of order one. For
d(n), the sum of d(n)^2 grows like x log^3 x / pi^2, which a least
squares fit on exact sums recovers.
"""

import math

from normord import build_table, d_moment_fit, moment_sums, turan_statistic
from normord.moments import MomentKind

N = 10**7
table = build_table(N)

tur = turan_statistic(N, table=table)
for x, t in tur.checkpoints[::4]:
    print(f"x = {x:>9d} turan = {t:.4f}")

fit = d_moment_fit(moment_sums("d", ["second"], N, table=table)[MomentKind.SECOND])
print("\nfit coefficients (log^3, log^2, log, 1):", [round(c, 5) for c in fit.coefficients])
print("leading", round(fit.leading, 5), "vs 1/pi^2 =", round(1 / math.pi**2, 5),
      f"relative error {fit.relative_error:.2%}")
