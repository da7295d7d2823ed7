# A tour of the exact coefficient field Q(zeta_M)(a, b, u)[r]/(r^2 - q).
#
# Everything the engine certifies is ultimately a statement "this element is
# (non)zero", so the arithmetic must be exact: rational functions in the two
# Satake-type parameters a, b, the ramified value u, and a formal square root
# r of q.  Run with: python demos/01_exact_scalars.py

from fractions import Fraction

from triform import Context
from triform.scalars import parse_scalar

ctx = Context(3, zeta_order=2)  # q = 3, and zeta_2 = -1 is available
a, b, u, r = ctx.a, ctx.b, ctx.u, ctx.r

print("the defining relation:   r * r =", (r * r).render())
print("a field identity:        a^2/a^2 =", (a**2 / a**2).render())

# The degenerate locus the theory excludes: (a^2 - 1)(b^2 - 1) = 0 would mean
# one of the first two representations is not an irreducible principal series.
A = a**3 / ((a * a - 1) * (b * b - 1))
print("a typical coefficient:   A =", A.render())
print("A at the excluded point a = 1 would divide by", ((a * a - 1) * (b * b - 1)).specialize({"a": 1}).render())

# Geometric tails are the engine's only notion of convergence: a one-sided
# geometric series is replaced by its rational closed form.
x = a * u
tail = x.geometric_tail(3)
print("sum_{k>=3} (a u)^k =", tail.render())
print("check: tail * (1 - a u) =", (tail * (1 - x)).render(), "= (a u)^3")

try:
    ctx.one().geometric_tail(0)
except Exception as e:
    print("tail at ratio 1:", e)

# Specialization is a ring homomorphism wherever it avoids the poles.
s = (a * a * b - ctx.scalar(ctx.zeta(2, 1))) / ((a * a - 1) * (b * b - 1)) + r * (u / (1 - a * b))
asg = {"a": Fraction(2), "b": Fraction(3), "u": Fraction(5)}
print("specialize misc scalar at (2, 3, 5):", s.specialize(asg).render())
print("hom check:", (s * tail).specialize(asg) == s.specialize(asg) * tail.specialize(asg))

# The textual grammar round-trips, so reports stay machine-readable.
print("round trip:", parse_scalar(ctx.field, s.render()) == s)
