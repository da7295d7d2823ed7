import random
from fractions import Fraction

import pytest

from triform import Context
from triform.characters import SmoothCharacter, parse_character_spec
from triform.cosets import enumerate_K_mod, p1_table
from triform.matrices import GroupElement
from triform.models import (
    ModelError,
    NewVectorError,
    TableSection,
    conductor_search,
    fixed_space,
    new_vector_by_solve,
    new_vector_unramified,
    principal_series_model,
    sections_equal,
    steinberg_model,
)

from conftest import rand_G, rand_K, rand_section


def test_new_vector_values(setup21):
    s = setup21
    g = s.gamma(-1)
    w = GroupElement.w(2)
    # sqrt(q)/mu1(pi) = 1/a at gamma^{-1} and mu1(pi)/sqrt(q) = a at w gamma^{-1}
    assert s.v1.eval(g) == s.ctx.a.inverse()
    assert s.v1.eval(w * g) == s.ctx.a
    # the spherical vector is 1 on all of K
    rng = random.Random(0)
    for _ in range(20):
        assert s.v2.eval(rand_K(s.ctx, rng)).is_one()
    assert s.v2.eval(GroupElement.diag(2, 2, 1)) == s.ctx.b


def test_condition_one_consistency(setup31):
    """f(b k) = chi delta^{1/2}(b) f(k) for upper-triangular integral b."""
    s = setup31
    rng = random.Random(1)
    sec = rand_section(s.V3, 2, rng)
    for _ in range(50):
        b = GroupElement(
            3,
            Fraction(rng.choice([1, 2, 4, 5])),
            rng.randint(0, 8),
            0,
            Fraction(rng.choice([1, 2, 4, 5])),
        )
        k = rand_K(s.ctx, rng)
        assert sec.eval(b * k) == s.V3.borel.eval(b) * sec.eval(k)


def test_refinement_consistency(setup32):
    s = setup32
    rng = random.Random(2)
    tbl = s.v3.terms[0][2]
    fine = tbl.refine(3)
    for _ in range(50):
        g = rand_G(s.ctx, rng, val_range=2)
        assert tbl.eval(g) == fine.eval(g)


def test_translation_action_axioms(setup21):
    s = setup21
    rng = random.Random(3)
    sec = s.v3
    assert sections_equal(sec.translated(GroupElement.identity(2)), sec)
    for _ in range(8):
        g = rand_G(s.ctx, rng, val_range=1)
        h = rand_G(s.ctx, rng, val_range=1)
        lhs = sec.translated(h).translated(g)  # x -> sec(x g h)
        rhs = sec.translated(g * h)
        for _ in range(6):
            x = rand_G(s.ctx, rng, val_range=1)
            assert lhs.eval(x) == rhs.eval(x)


def test_translate_matches_pointwise(setup21):
    s = setup21
    rng = random.Random(4)
    g = rand_G(s.ctx, rng, val_range=1)
    moved = s.v3.translated(g)
    for _ in range(20):
        x = rand_G(s.ctx, rng, val_range=1)
        assert moved.eval(x) == s.v3.eval(x * g)


def test_K_invariance_of_spherical(setup31):
    s = setup31
    rng = random.Random(5)
    for _ in range(20):
        k = rand_K(s.ctx, rng)
        assert sections_equal(s.v1.translated(k), s.v1)


def test_steinberg_dimensions(ctx2, ctx3):
    for ctx in (ctx2, ctx3):
        St = steinberg_model(ctx)
        assert len(fixed_space(St, 0)) == 0
        basis = fixed_space(St, 1)
        assert len(basis) == 1
        assert conductor_search(St) == 1
        v3 = new_vector_by_solve(St, 1)
        tbl = v3.terms[0][2]
        assert tbl.k_average().is_zero()
        # value table on the two Iwahori orbits of P^1(F_p): ratio forced to -p
        assert tbl.values[0].is_one()
        for v in tbl.values[1:]:
            assert v == ctx.scalar(Fraction(-1, ctx.p))


def test_steinberg_stability(setup21):
    """K-averages of Steinberg translates stay zero."""
    s = setup21
    rng = random.Random(6)
    for _ in range(20):
        g = rand_G(s.ctx, rng, val_range=1)
        moved = s.v3.translated(g)
        assert moved.as_table(moved.level_bound()).k_average().is_zero()


def test_ramified_solve_and_conductor(setup32, setup24):
    for s, expected in ((setup32, 2), (setup24, 4)):
        assert conductor_search(s.V3) == expected
        for below in range(expected):
            assert len(fixed_space(s.V3, below)) == 0
        assert len(fixed_space(s.V3, expected)) == 1
        with pytest.raises(NewVectorError):
            new_vector_by_solve(s.V3, expected - 1)


def test_unramified_solve_matches_spherical(setup31):
    s = setup31
    solved = new_vector_by_solve(s.V1, 0, level=1)
    assert sections_equal(solved, s.v1)
    assert conductor_search(s.V1) == 0


def test_v1_star_invariance(setup32):
    s = setup32
    n = 2
    rng = random.Random(7)
    v1star = s.v1.translated(s.gamma(-n))
    gam = s.gamma(n)
    for _ in range(20):
        rho = gam.inv() * rand_K(s.ctx, rng, m=4) * gam
        assert sections_equal(v1star.translated(rho), v1star)


def test_mask_levels(setup32):
    # ramified data has no sections below its conductor exponent
    with pytest.raises(ModelError):
        TableSection(setup32.V3, 0, [])
    assert all(setup32.V3.admissible_mask(1))
    ctx = Context(2, zeta_order=2)
    mu3 = parse_character_spec(ctx, "ram(c=2, gens=[3->zeta2^1], pi=u)")
    V3 = principal_series_model(ctx, mu3)
    assert not any(V3.admissible_mask(1))
    assert all(V3.admissible_mask(2))
    with pytest.raises(ModelError):
        V3.section(1, [ctx.one()] * p1_table(ctx, 1).size)


def test_full_K_table_oracle(setup32):
    """Validate P^1-table evaluation against a full K/K(m) value table at m <= 2."""
    s = setup32
    rng = random.Random(8)
    sec = s.v3
    m = 2
    full = {tuple(e.residue(m) for e in k.entries()): sec.eval(k) for k in enumerate_K_mod(s.ctx, m).reps}
    for _ in range(40):
        k = rand_K(s.ctx, rng, m=3)
        key = tuple(e.residue(m) for e in k.entries())
        assert sec.eval(k) == full[key]


def test_stabilizer_twist_brute_force(setup32):
    """The admissibility rule (everything admissible once level >= conductor)
    against brute force over the (B cap K)-stabilizer at m <= 2."""
    ctx = setup32.ctx
    p, m = 3, 1
    table = p1_table(ctx, m)
    mu3 = setup32.mu3
    for rep in table.reps:
        trivial = True
        for b1 in (1, 2):
            for b0 in range(3):
                for b2 in (1, 2):
                    b = GroupElement(p, b1, b0, 0, b2)
                    conj = rep.inv() * b * rep
                    if conj.in_K_principal(m):
                        if not (mu3.unit_image(b1 % 3) * mu3.inverse().unit_image(b2 % 3)).is_one():
                            trivial = False
        assert trivial  # matches admissible_mask(level 1) = all True for c = 1


def test_section_dump(setup21):
    tbl = setup21.v3.terms[0][2]
    dump = tbl.dump()
    assert dump.splitlines()[0] == "cell (0:1) -> 1"
    assert "(1:0)" in dump
