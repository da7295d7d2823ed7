"""Enumeration completeness against brute-force oracles."""

import random
from fractions import Fraction
from itertools import product

import pytest

from triform import Context
from triform.cosets import (
    enumerate as enumerate_cosets,
    enumerate_iwahori_mod,
    enumerate_K_mod,
    gl2_size,
    iwahori_orbit_key,
    p1_size,
    p1_table,
    torus_orbit_reps,
)
from triform.context import LevelTooDeepError

from conftest import rand_K


def brute_p1_count(p: int, m: int) -> int:
    """Primitive bottom rows mod p^m up to unit scaling, counted directly."""
    mod = p**m
    units = [x for x in range(mod) if x % p]
    seen = set()
    for z, t in product(range(mod), range(mod)):
        if z % p == 0 and t % p == 0:
            continue
        orbit = min((z * e % mod, t * e % mod) for e in units)
        seen.add(orbit)
    return len(seen)


def test_p1_counts_brute_force():
    assert p1_size(2, 1) == brute_p1_count(2, 1) == 3
    assert p1_size(3, 2) == brute_p1_count(3, 2) == 12
    assert p1_size(2, 2) == brute_p1_count(2, 2) == 6
    assert p1_size(5, 1) == brute_p1_count(5, 1) == 6


def test_K_mod_counts():
    ctx = Context(2)
    assert len(enumerate_K_mod(ctx, 1)) == 6  # GL2(F_2)
    assert len(enumerate_K_mod(ctx, 2)) == gl2_size(2, 2)
    ctx3 = Context(3)
    assert len(enumerate_K_mod(ctx3, 1)) == 48


def test_p1_cell_lookup_partition(ctx3):
    """Every k in K reduces to exactly one representative cell."""
    rng = random.Random(9)
    table = p1_table(ctx3, 2)
    for _ in range(100):
        k = rand_K(ctx3, rng, m=3)
        cell = table.cell_of(k)
        rep = table.reps[cell]
        h = k * rep.inv()
        # h lies in (B cap K) K(m): its lower-left entry dies mod p^m
        assert h.z.is_zero() or h.z.val() >= 2
    # distinct reps are pairwise inequivalent
    for i, rep in enumerate(table.reps):
        assert table.cell_of(rep) == i


def test_p1_children(ctx2):
    t1 = p1_table(ctx2, 1)
    t2 = p1_table(ctx2, 2)
    seen = set()
    for idx in range(t1.size):
        kids = t1.children(idx)
        assert len(kids) == 2
        for kid in kids:
            assert t2.cell_of(t1.reps[idx]) != -1
            seen.add(kid)
    assert seen == set(range(t2.size))


def test_iwahori_enumeration(ctx2):
    t = enumerate_iwahori_mod(ctx2, 1, 2)
    assert len(t) == gl2_size(2, 2) // p1_size(2, 1)
    for rep in t.reps:
        assert rep.in_iwahori(1)
    # pairwise inequivalent mod K(2)
    keys = set()
    for rep in t.reps:
        keys.add(tuple(e.residue(2) for e in rep.entries()))
    assert len(keys) == len(t)


def test_torus_orbit_mass(ctx2, ctx3):
    assert torus_orbit_reps(ctx2, 1, 1).total_mass() == Fraction(1, 3)
    assert torus_orbit_reps(ctx2, 1, 2).total_mass() == Fraction(1, 3)
    assert torus_orbit_reps(ctx3, 2, 2).total_mass() == Fraction(1, 12)


def test_orbit_key_invariance(ctx3):
    rng = random.Random(11)
    n, m = 1, 2
    for _ in range(40):
        k = rand_K(ctx3, rng, m=m)
        if not k.in_iwahori(n):
            continue
        e1, e2 = rng.choice([1, 2, 4, 5, 7, 8]), rng.choice([1, 2, 4, 5, 7, 8])
        from triform.matrices import GroupElement

        t = GroupElement.diag(3, e1, e2)
        assert iwahori_orbit_key(ctx3, t * k, n, m) == iwahori_orbit_key(ctx3, k, n, m)


def test_level_cap():
    ctx = Context(2)
    with pytest.raises(LevelTooDeepError):
        p1_table(ctx, 40)
    from triform.cosets import LevelTooDeepError as EnumCap

    with pytest.raises(EnumCap):
        enumerate_K_mod(ctx, 5)


def test_dispatcher_and_dump(ctx2):
    t = enumerate_cosets(ctx2, "P1", 1)
    dump = t.dump()
    assert "level 1: [1 0; 0 1]" in dump
    assert len(dump.splitlines()) == len(t) + 1
