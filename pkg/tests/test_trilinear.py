"""Both evaluators of the trilinear form and the maps of the orbit sequence."""

import random
from fractions import Fraction

import pytest

from triform.functionals import Phi_eval, TorusFunctional, make_indicator_f
from triform.cosets import iwahori_orbit_key, p1_table, torus_orbit_reps
from triform.functionals import CompactInducedFn
from triform.matrices import GroupElement
from triform.trilinear import (
    KernelForm,
    KernelUnsupportedError,
    TensorFn,
    closed_form_tensor,
    derive_kernel_characters,
    ell_chain,
    ext,
    res_diag,
    simple_case_pairing,
)

from conftest import rand_G, rand_K, rand_section


@pytest.fixture(scope="module")
def phi21(setup21):
    return TorusFunctional(setup21.ctx, setup21.mu1, setup21.mu2, setup21.V3)


@pytest.fixture(scope="module")
def phi32(setup32):
    return TorusFunctional(setup32.ctx, setup32.mu1, setup32.mu2, setup32.V3)


def test_ext_is_the_pair_indicator(setup21, setup32):
    for s in (setup21, setup32):
        f = make_indicator_f(s.ctx, s.mu1, s.mu2, s.n)
        F = ext(f, s.V1, s.V2)
        lvl = F.pair_table[0]
        table = p1_table(s.ctx, lvl)
        for i, rep1 in enumerate(table.reps):
            for j, rep2 in enumerate(table.reps):
                want = s.ctx.one() if (rep1.in_iwahori(s.n) and not rep2.in_iwahori(1)) else s.ctx.zero()
                assert F.pair_table[3][i][j] == want


def test_closed_form_matches_ext(setup21, setup32):
    rng = random.Random(0)
    for s in (setup21, setup32):
        f = make_indicator_f(s.ctx, s.mu1, s.mu2, s.n)
        F = ext(f, s.V1, s.V2)
        FV = closed_form_tensor(s.ctx, s.mu1, s.mu2, s.v1, s.v2, s.n)
        table = p1_table(s.ctx, F.pair_table[0])
        for i, rep1 in enumerate(table.reps):
            for j, rep2 in enumerate(table.reps):
                assert FV.eval_pair(rep1, rep2) == F.pair_table[3][i][j]
        # also off K: the defining relation F(g, wg) = f(g)
        w = GroupElement.w(s.ctx.p)
        for _ in range(10):
            g = rand_G(s.ctx, rng, val_range=1)
            assert FV.eval_pair(g, w * g) == f.eval(g)


def test_ext_vanishes_on_diagonal_orbit(setup21):
    s = setup21
    rng = random.Random(1)
    f = make_indicator_f(s.ctx, s.mu1, s.mu2, 1)
    F = ext(f, s.V1, s.V2)
    for _ in range(15):
        g = rand_G(s.ctx, rng, val_range=1)
        b = GroupElement(2, Fraction(rng.choice([1, 3])) * 2 ** rng.randint(-1, 1), rng.randint(0, 3), 0, Fraction(rng.choice([1, 3])))
        assert F.eval_pair(g, b * g).is_zero()


def test_res_diag_values(setup21):
    s = setup21
    ctx = s.ctx
    v1star = s.v1.translated(s.gamma(-1))
    F = TensorFn.pure(ctx, 1, v1star, s.v2)
    res = res_diag(F, s.mu1, s.mu2)
    assert res.eval(GroupElement.identity(2)) == ctx.a.inverse()
    assert res.eval(GroupElement.w(2)) == ctx.a


def test_chain_consistency_random_supports(setup21, phi21):
    s = setup21
    rng = random.Random(2)
    n, level = 1, 2
    table = torus_orbit_reps(s.ctx, n, level)
    keys = [iwahori_orbit_key(s.ctx, rep, n, level) for rep in table.reps]
    for _ in range(3):
        support = frozenset(k for k in keys if rng.random() < 0.5) or frozenset([keys[0]])
        f = CompactInducedFn(s.ctx, s.mu1, s.mu2, n, level, support=support)
        F = ext(f, s.V1, s.V2, level)
        assert ell_chain(phi21, F, s.v3) == Phi_eval(phi21, f, s.v3)


def test_intro_vanishing(setup21, phi21, setup32, phi32):
    for s, phi in ((setup21, phi21), (setup32, phi32)):
        z = ell_chain(phi, TensorFn.pure(s.ctx, 1, s.v1, s.v2), s.v3)
        assert z.is_zero()


def test_main_theorem_values(setup21, phi21, setup32, phi32):
    for s, phi in ((setup21, phi21), (setup32, phi32)):
        F = TensorFn.pure(s.ctx, 1, s.v1.translated(s.gamma(-s.n)), s.v2)
        val = ell_chain(phi, F, s.v3)
        assert not val.is_zero()


def test_psi_vanishing_n2(setup32, phi32):
    s = setup32
    assert ell_chain(phi32, TensorFn.pure(s.ctx, 1, s.v1.translated(s.gamma(-1)), s.v2), s.v3).is_zero()


def test_g_invariance_chain(setup21, phi21):
    s = setup21
    rng = random.Random(3)
    F = TensorFn.pure(s.ctx, 1, s.v1, s.v2.translated(s.gamma(-1)))
    base = ell_chain(phi21, F, s.v3)
    for g in [rand_K(s.ctx, rng) for _ in range(4)] + [GroupElement.w(2), rand_G(s.ctx, rng, 1)]:
        assert ell_chain(phi21, F.translated(g), s.v3.translated(g)) == base


def test_kernel_characters_derivation(setup32):
    s = setup32
    ctx = s.ctx
    nu12, nu13, nu23 = derive_kernel_characters(ctx, s.mu1, s.mu2, s.mu3)
    # value at pi pins q a b / u and friends (derived, then verified here)
    assert nu12.value_at_pi == ctx.scalar(3) * ctx.a * ctx.b * ctx.r / ctx.u
    assert nu13.value_at_pi == ctx.a * ctx.u * ctx.r / ctx.b
    assert nu23.value_at_pi == ctx.b * ctx.u * ctx.r / ctx.a
    for nu in (nu12, nu13, nu23):
        assert nu.c == 1


def test_kernel_refuses_steinberg(setup21):
    with pytest.raises(KernelUnsupportedError):
        KernelForm(setup21.ctx, setup21.mu1, setup21.mu2, setup21.V3)


def test_kernel_invariance_and_proportionality(setup32, phi32):
    s = setup32
    ctx = s.ctx
    rng = random.Random(4)
    kform = KernelForm(ctx, s.mu1, s.mu2, s.V3)
    f1 = rand_section(s.V1, 1, rng)
    f2 = rand_section(s.V2, 1, rng)
    f3 = rand_section(s.V3, 1, rng)
    base = kform.eval(f1, f2, f3)
    for g in [rand_K(s.ctx, rng) for _ in range(5)] + [GroupElement.w(3), s.gamma(1)]:
        assert kform.eval(f1.translated(g), f2.translated(g), f3.translated(g)) == base
    # proportionality against the chain route on a few triples
    ratio = None
    checked = 0
    while checked < 3:
        fa, fb, fc = (rand_section(s.V1, 1, rng), rand_section(s.V2, 1, rng), rand_section(s.V3, 1, rng))
        cv = ell_chain(phi32, TensorFn.pure(ctx, 1, fa, fb), fc)
        kv = kform.eval(fa, fb, fc)
        if cv.is_zero():
            assert kv.is_zero()
            continue
        checked += 1
        r = kv / cv
        if ratio is None:
            ratio = r
        assert r == ratio
    assert not ratio.is_zero()


def test_kernel_nonvanishing_main_tensor(setup32):
    s = setup32
    kform = KernelForm(s.ctx, s.mu1, s.mu2, s.V3)
    val = kform.eval(s.v1.translated(s.gamma(-2)), s.v2, s.v3)
    assert not val.is_zero()


def test_simple_case(setup21):
    s = setup21
    ctx = s.ctx
    from triform.characters import SmoothCharacter
    from triform.models import new_vector_unramified, principal_series_model

    mu2s = SmoothCharacter.unramified(ctx, ctx.a.inverse() * ctx.r)
    V2s = principal_series_model(ctx, mu2s, tag="V2s")
    v2s = new_vector_unramified(V2s)
    F = TensorFn.pure(ctx, 1, s.v1.translated(s.gamma(-1)), v2s)
    res = res_diag(F, s.mu1, mu2s)
    pairing = simple_case_pairing(res, s.v3)
    assert pairing == (1 - ctx.a**2) / (ctx.scalar(3) * ctx.a)
    zero = simple_case_pairing(res_diag(TensorFn.pure(ctx, 1, s.v1, v2s), s.mu1, mu2s), s.v3)
    assert zero.is_zero()
