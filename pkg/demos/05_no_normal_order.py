"""
Why phi has no normal order
===========================

If phi had a normal order, second moment over first moment squared would
force B = A^2. The certified enclosures say B - A^2 > 0, so the verdict is
negative. The centered variance and the density of n far from A n show the
same gap numerically.
"""

from fractions import Fraction

from normord import (build_table, centered_variance, certified_slope, class_m_verdict, constant_A,
                     constant_B, criterion_margin, density_profile)

N = 10**7
A, B = constant_A(), constant_B()
table = build_table(N)

rep = class_m_verdict("phi", 2, A, B, table=table)
print("verdict:", rep.verdict)
for note in rep.notes:
    print("  note:", note)

c = certified_slope(A)
var = centered_variance("phi", c, N, table=table)
print("\nx, (3/x^3) sum (phi(n) - A n)^2")
for x, _, v in var.checkpoints[::4]:
    print(f"{x:>10d} {float(v):.7f}")
m = criterion_margin(A, B)
print("B - A^2 in", [float(m.lo), float(m.hi)])

print("\nshare of n <= x with |phi(n) - A n| >= eps A n")
for r in density_profile("phi", [Fraction(1, 100), Fraction(1, 20), Fraction(1, 10)], c,
                         [10**4, 10**5, 10**6, 10**7], table=table):
    print(f"eps = {float(r.epsilon):<5} x = {r.limit:>9d} density = {float(r.density):.4f}")
