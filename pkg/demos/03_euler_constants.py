"""
Certified Euler products
========================

A = prod (1 - p^-2) and B = prod (1 - 2p^-2 + p^-3) are truncated at P,
multiplied in directed fixed point and widened by a tail bound. The
enclosures shrink as P grows, and B - A^2 stays strictly positive.
"""

import math

from normord import constant_A, constant_B, criterion_margin

for P in (10**3, 10**5, 10**7):
    A, B = constant_A(P), constant_B(P)
    m = criterion_margin(A, B)
    lo, hi = m.decimal_bounds(10)
    print(f"P = {P:>8d}  A in [{float(A.lo):.10f}, {float(A.hi):.10f}]"
          f"  B in [{float(B.lo):.10f}, {float(B.hi):.10f}]  B - A^2 in [{lo}, {hi}]")

print("6/pi^2 =", 6 / math.pi**2)
print(constant_A().to_json())
