"""
Exact moment sums and their remainders
======================================

Sums of phi(n) and phi(n)^2 are accumulated as exact integers at a
geometric grid of checkpoints. Against A x^2/2 and B x^3/3 the remainders,
divided by x log x and x^2 log^2 x, stay bounded.
"""

from normord import constant_A, constant_B, moment_sums, remainder_profile
from normord.moments import MomentKind

N = 10**7
A, B = constant_A(), constant_B()
sums = moment_sums("phi", ["first", "second"], N)

for kind, pred, const in ((MomentKind.FIRST, "mertens", A), (MomentKind.SECOND, "segal", B)):
    prof = remainder_profile(sums[kind], pred, const)
    print(f"\n{pred}: x, sum, normalized remainder")
    for p in prof.checkpoints[::4]:
        print(f"{p.x:>10d} {p.sum:>28d} {p.normalized:+.5f}")
    print("sup on [1e3, 1e5]:", round(prof.sup_normalized(10**3, 10**5), 5),
          " sup on [1e5, 1e7]:", round(prof.sup_normalized(10**5, 10**7), 5))
