"""
Exact identities behind the argument
====================================

phi(n)/n = sum over d | n of mu(d)/d, the squared version of the same
identity, and the bound on g(b) by b d(b) are all checked in rational
arithmetic.
"""

from normord import build_table, verify_identities
from normord.identities import g, g_bound_chain, mobius_ratio, squared_identity_sides

for n in (1, 6, 12, 30, 360):
    print(n, "phi(n)/n =", mobius_ratio(n), " squared sides:", squared_identity_sides(n),
          " g =", g(n), " chain:", g_bound_chain(n))

rep = verify_identities(10**4, build_table(10**4))
print("checked:", rep.checked, "failures:", rep.failures, "passed:", rep.passed)
