# The group-theoretic substrate: exact 2x2 matrices over Q_p, the Iwasawa
# decomposition, congruence subgroups, and the finite coset tables that turn
# every integral into a finite sum.
# Run with: python demos/02_matrices_and_cosets.py

import random
from fractions import Fraction

from triform import Context
from triform.cosets import enumerate_K_mod, p1_table, torus_orbit_reps
from triform.matrices import GroupElement, in_T_In, iwasawa

ctx = Context(2)
p = ctx.p

gamma = GroupElement.gamma(p)          # diag(pi, 1)
w = GroupElement.w(p)                  # the Weyl reflection
print("gamma =", gamma, " w =", w)
print("w in K:", w.in_K(), "   w in I(1):", w.in_iwahori(1))
print("gamma in K:", gamma.in_K())

# Iwasawa: every invertible matrix splits as upper-triangular times compact.
rng = random.Random(0)
g = GroupElement(p, Fraction(7, 4), 3, Fraction(5, 2), 1)
bpart, kpart = iwasawa(g)
print("g =", g, " = ", bpart, "*", kpart)
assert bpart * kpart == g and kpart.in_K()

# Membership in T I(n) has an exact witness or a definite refusal.
k = GroupElement.lower(p, 2)  # in I(1)
t, kk = in_T_In(GroupElement.diag(p, 2, 1) * k, 1)
print("diag(pi,1) k factors as", t, "*", kk)
print("w in T I(1):", in_T_In(w, 1) is not None)

# The projective line over O/p^m indexes everything; cells carry equal mass.
for m in (1, 2, 3):
    table = p1_table(ctx, m)
    print(f"|P^1(O/2^{m})| = {table.size}, cell mass {table.cell_mass}")
print("|GL2(F_2)| =", len(enumerate_K_mod(ctx, 1)))

# The unit orbit of T\G under I(n): its total mass is the lambda constant.
orbit = torus_orbit_reps(ctx, 1, 2)
print("unit-orbit cells at (n, m) = (1, 2):", len(orbit), "total mass", orbit.total_mass())
print()
print(p1_table(ctx, 1).as_coset_table().dump())
