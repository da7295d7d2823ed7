# Finite-level models of the representations: induced sections as value
# tables on projective cells, exact lazy translation, new vectors found by
# linear algebra, conductors found by search.
# Run with: python demos/03_sections_new_vectors.py

from triform import Context
from triform.characters import SmoothCharacter, parse_character_spec
from triform.cosets import p1_table
from triform.matrices import GroupElement
from triform.models import (
    conductor_search,
    fixed_space,
    new_vector_by_solve,
    new_vector_unramified,
    principal_series_model,
    steinberg_model,
)

ctx = Context(3, zeta_order=2)
a, r = ctx.a, ctx.r

# Two unramified principal series with Satake-type values a and b.
mu1 = SmoothCharacter.unramified(ctx, a * r)
V1 = principal_series_model(ctx, mu1, tag="V1")
v1 = new_vector_unramified(V1)

gamma = GroupElement.gamma(3)
w = GroupElement.w(3)
print("v1(gamma^-1)   =", v1.eval(gamma.inv()).render(), "  (sqrt q / mu1(pi) = 1/a)")
print("v1(w gamma^-1) =", v1.eval(w * gamma.inv()).render(), "  (mu1(pi) / sqrt q = a)")

# The three-branch translation profile of gamma^{-i} v1 over the cells.
ti = v1.translated(GroupElement.gamma(3, -2))
prof = {}
for rep in p1_table(ctx, 3).reps:
    prof.setdefault(ti.eval(rep).render(), 0)
    prof[ti.eval(rep).render()] += 1
print("value profile of gamma^-2 v1 on level-3 cells:", prof)

# Steinberg: the zero-average subspace; its new vector lives at depth one.
St = steinberg_model(ctx)
v3 = new_vector_by_solve(St, 1)
print("Steinberg new vector table:", [x.render() for x in v3.terms[0][2].values])
print("Steinberg conductor:", conductor_search(St))

# A ramified principal series: conductor twice the character's exponent.
mu3 = parse_character_spec(ctx, "ram(c=1, gens=[2->zeta2^1], pi=u)")
V3 = principal_series_model(ctx, mu3, tag="V3")
print("fixed-space dimensions at depths 0, 1, 2:", [len(fixed_space(V3, n)) for n in (0, 1, 2)])
print("conductor of the (mu3, mu3^-1) series:", conductor_search(V3))
v3r = new_vector_by_solve(V3, 2)
print("its new vector, as a cell table:")
print(v3r.terms[0][2].dump())
