"""The torus-equivariant functional phi and the compact-orbit integral Phi.

phi is realized on the open Bruhat cell: phi(v) = integral over F* of
v(wbar n(y)) chi~(y) d*y, with the twist chi~ derived (not hardcoded) from the
equivariance law phi(pi(t) v) = (chi_2/chi_1)(t) phi(v) via the exact cocycle
    wbar n(y) t = diag(t2, t1) wbar n(y t2/t1).
Every evaluation reduces to one universal shape phi(pi(n(x0)) w) with w a
table section, which is an exact piecewise character sum: finitely many annuli
of F* resolved into unit classes, plus closed geometric tails on both ends.
The engine returns the vector of values on the cell basis, so translates cost
one table transform and a dot product.
"""

from __future__ import annotations

from fractions import Fraction

from .characters import SmoothCharacter
from .context import Context
from .cosets import p1_table, torus_orbit_reps, iwahori_orbit_key, units_mod
from .matrices import GroupElement, in_T_In, iwasawa
from .models import InducedModel, Section, TableSection
from .padic import PadicRational
from .scalars import Scalar


class FunctionalError(Exception):
    pass


def derive_phi_twist(mu1: SmoothCharacter, mu2: SmoothCharacter, model3: InducedModel) -> SmoothCharacter:
    """Solve the equivariance constraint for the open-cell twist.

    Substituting y -> y t2/t1 in the open-cell integral and using the cocycle
    wbar n(y) t = diag(t2, t1) wbar n(y t2/t1) forces
        chi~(s) = (mu2/mu1)(s) * [s -> chi_3 delta^{1/2}(diag(1, s))]^{-1}.
    The right factor is itself a smooth character of F* built from the model's
    Borel data, so chi~ is produced by character algebra; the equivariance
    property test certifies the construction.
    """
    ctx = mu1.ctx
    chi_d = model3.borel.chi_d
    # chi_3 delta^{1/2}(diag(1, s)) = chi_d(s) * |1/s|^{1/2}, value at pi: chi_d(pi) * r
    diag_char = SmoothCharacter(ctx, chi_d.c, chi_d.images, chi_d.value_at_pi * ctx.r)
    return (mu2 / mu1) * diag_char.inverse()


class WProfile:
    """tau -> (cell, factor) with  w(wbar n(tau)) = factor * table[cell].

    For val(tau) >= 1 the matrix (0 1; 1 tau) sits over the infinity-chart
    cell of tau with no residual twist.  For val(tau) <= 0 it factors as
    (-1/tau, 1; 0, tau) * nbar(1/tau), contributing
    chi_a(-1) (chi_d/chi_a)(tau) q^{val tau} over the z-chart cell of 1/tau.
    """

    def __init__(self, model: InducedModel, level: int, key_level: int):
        self.model = model
        self.ctx = model.ctx
        self.m = level
        self.key_level = key_level  # unit keys are residues mod p^key_level
        self.table = p1_table(self.ctx, level)
        self.ratio = model.borel.chi_d / model.borel.chi_a
        self.sign_factor = self.ctx.scalar(model.borel.chi_a.unit_image((-1) % self.ctx.p ** max(1, model.borel.chi_a.c)))
        self.pos_cell = self.ctx.p**level  # infinity-chart cell of t = 0
        self.zero_cell = 0  # z-chart cell of z = 0
        self._ratio_pi_q = self.ratio.value_at_pi * self.ctx.scalar(self.ctx.q)
        self._unit_cache: dict[int, Scalar] = {}
        self._pow_cache: dict[int, Scalar] = {0: self.ctx.one()}
        self._term_cache: dict = {}

    def ratio_pi_q_pow(self, k: int) -> Scalar:
        if k not in self._pow_cache:
            self._pow_cache[k] = self._ratio_pi_q**k
        return self._pow_cache[k]

    def ratio_unit(self, eps: int) -> Scalar:
        c = max(self.ratio.c, 1)
        key = eps % self.ctx.p**c
        if key not in self._unit_cache:
            self._unit_cache[key] = self.ctx.scalar(self.ratio.unit_image(key))
        return self._unit_cache[key]

    def term(self, k: int, eps: int) -> tuple[int, Scalar]:
        """Cell and factor at tau = pi^k * eps (eps a unit residue mod p^key_level).

        For val(tau) >= 1 the residual factor against the det-one lift
        (0 -1; 1 t0) is diag(-1, 1) mod p^m, contributing chi_a(-1).
        """
        key = (k, eps)
        hit = self._term_cache.get(key)
        if hit is not None:
            return hit
        p, m = self.ctx.p, self.m
        mod = p**m
        if k >= 1:
            tkey = (p**k * eps) % mod if k < m else 0
            out = (mod + tkey // p, self.sign_factor)
        else:
            zkey = (p ** (-k) * pow(eps, -1, mod)) % mod if -k < m else 0
            out = (zkey, self.sign_factor * self.ratio_pi_q_pow(k) * self.ratio_unit(eps))
        self._term_cache[key] = out
        return out

    def neg_unit_char_times(self, ch: SmoothCharacter) -> SmoothCharacter:
        return self.ratio * ch


class TorusFunctional:
    """phi, its Phi-integral over the unit orbit, and the value caches.

    Carries (mu1, mu2, model3); the twist chi~ is derived at construction and
    the equivariance law is what the property tests certify.
    """

    def __init__(self, ctx: Context, mu1: SmoothCharacter, mu2: SmoothCharacter, model3: InducedModel, depth_cap: int = 10):
        if not (mu1.is_unramified() and mu2.is_unramified()):
            raise FunctionalError("the first two representations must be unramified principal series")
        self.ctx = ctx
        self.mu1 = mu1
        self.mu2 = mu2
        self.model3 = model3
        self.depth_cap = depth_cap
        self.chtil = derive_phi_twist(mu1, mu2, model3)
        self.ratio21 = mu2 / mu1
        self._profiles: dict[int, WProfile] = {}
        self._vectors: dict = {}
        self._chtil_unit_cache: dict[int, Scalar] = {}
        self._X_pows: dict[int, Scalar] = {0: ctx.one()}

    # -- plumbing ------------------------------------------------------------
    def profile(self, level: int) -> WProfile:
        if level not in self._profiles:
            extra = max(1, self.chtil.c, (self.model3.borel.chi_d / self.model3.borel.chi_a).c)
            self._profiles[level] = WProfile(self.model3, level, level + extra)
        return self._profiles[level]

    def torus_factor(self, t: GroupElement) -> Scalar:
        """(chi_2/chi_1)(t) = (mu_2/mu_1)(t_1/t_2)."""
        return self.ratio21.eval(t.x / t.t)

    def _chtil_unit(self, eps: int) -> Scalar:
        c = max(self.chtil.c, 1)
        key = eps % self.ctx.p**c
        hit = self._chtil_unit_cache.get(key)
        if hit is None:
            hit = self.ctx.scalar(self.chtil.unit_image(key))
            self._chtil_unit_cache[key] = hit
        return hit

    # -- the Tate engine: vectors of phi over the cell basis ------------------
    def tate_vector(self, level: int, x0_key) -> list[Scalar]:
        """phi(pi(n(x0)) delta_cell) for every cell, as one vector.

        x0_key is None for x0 = 0 (in particular val(x0) >= level), else
        (val x0, unit residue of x0 mod p^{key_level}).
        """
        cache_key = (level, x0_key)
        if cache_key in self._vectors:
            return self._vectors[cache_key]
        W = self.profile(level)
        p, q = self.ctx.p, self.ctx.q
        mt = W.key_level
        units = units_mod(p, mt)
        cmass_s = self.ctx.scalar(Fraction(1, (q - 1) * q ** (mt - 1)))
        X = self.chtil.value_at_pi
        xpow = self._X_pows

        def Xp(k: int) -> Scalar:
            if k not in xpow:
                xpow[k] = X**k
            return xpow[k]

        m = level
        vec = [self.ctx.zero() for _ in range(len(W.table.reps))]

        def add(cell: int, s: Scalar):
            if not s.is_zero():
                vec[cell] = vec[cell] + s

        def plain_window(k: int, shift: int = 0):
            xk = Xp(k) * cmass_s
            for eps in units:
                key = (eps + shift) % p**mt
                cell, fac = W.term(k, key)
                add(cell, xk * self._chtil_unit(eps) * fac)

        def plain_neg_tail(k_hi: int):
            """Sum over k <= k_hi of the multiplicative deep-negative annuli (k_hi <= -m)."""
            ch = W.neg_unit_char_times(self.chtil)
            if ch.c != 0:
                return  # the unit integral kills every deep annulus
            rho = X * W._ratio_pi_q
            add(W.zero_cell, W.sign_factor * rho.inverse().geometric_tail(-k_hi))

        def plain_upto(k_hi: int):
            if k_hi <= -m:
                plain_neg_tail(k_hi)
                return
            plain_neg_tail(-m)
            for k in range(-m + 1, k_hi + 1):
                plain_window(k)

        if x0_key is None:
            plain_upto(m - 1)
            if self.chtil.c == 0:
                cell, fac = W.term(m, 1)
                add(cell, fac * X.geometric_tail(m))
        else:
            K0, c0 = x0_key
            # region A: k < K0, the additive shift x0 pi^{-k} perturbs the unit key
            a_cut = K0 - mt  # below this the shift is invisible mod p^mt
            plain_upto(a_cut - 1)
            for k in range(a_cut, K0):
                plain_window(k, shift=c0 * p ** (K0 - k))
            # region B: k > K0, tau stays in the annulus of x0
            for k in range(K0 + 1, K0 + mt):
                xk = Xp(k) * cmass_s
                for eps in units:
                    key = (c0 + eps * p ** (k - K0)) % p**mt
                    cell, fac = W.term(K0, key)
                    add(cell, xk * self._chtil_unit(eps) * fac)
            if self.chtil.c == 0:
                cell, fac = W.term(K0, c0)
                add(cell, fac * X.geometric_tail(K0 + mt))
            # region C: k = K0, stratified by d = val(eps + c0)
            xk0 = Xp(K0)
            xk0m = xk0 * cmass_s
            for eps in units:
                if (eps + c0) % p != 0:
                    cell, fac = W.term(K0, (eps + c0) % p**mt)
                    add(cell, xk0m * self._chtil_unit(eps) * fac)
            d_plus = max(1, self.chtil.c, m - K0)
            for d in range(1, d_plus):
                dmass = xk0 * self.ctx.scalar(Fraction(1, (q - 1) * q ** (d + mt - 1)))
                for eta in units:
                    eps_res = (-c0 + p**d * eta) % p**mt
                    cell, fac = W.term(K0 + d, eta)
                    add(cell, dmass * self._chtil_unit(eps_res) * fac)
            # d >= d_plus: tau is deep positive, W is the constant infinity cell
            tail_mass = Fraction(q, q - 1) * Fraction(1, q**d_plus)
            cell, fac = W.term(K0 + d_plus, 1)
            add(cell, fac * xk0 * self._chtil_unit((-c0) % p**mt) * self.ctx.scalar(tail_mass))

        self._vectors[cache_key] = vec
        return vec

    def _x0_key(self, x0: PadicRational, level: int):
        if x0.is_zero() or x0.val() >= level:
            return None
        mt = self.profile(level).key_level
        return (x0.val(), x0.unit_residue(mt))

    # -- public evaluation -----------------------------------------------------
    def phi_table(self, tbl: TableSection, x0: PadicRational | None = None) -> Scalar:
        key = None if x0 is None else self._x0_key(x0, tbl.level)
        vec = self.tate_vector(tbl.level, key)
        out = self.ctx.zero()
        for v, w in zip(tbl.values, vec):
            if not (v.is_zero() or w.is_zero()):
                out = out + v * w
        return out

    def eval(self, section: Section) -> Scalar:
        """phi of a formal sum of lazy translates: reduce each term through
        h = b kappa (Iwasawa), b = t n(x0), then equivariance plus the engine."""
        if section.model is not self.model3:
            raise FunctionalError("phi evaluated on a section of a different model")
        out = self.ctx.zero()
        for c, g, tbl in section.terms:
            if c.is_zero():
                continue
            b, kappa = iwasawa(g)
            w2 = tbl if kappa == GroupElement.identity(self.ctx.p) else tbl.translate_K(kappa)
            t = GroupElement.diag(self.ctx.p, b.x, b.t)
            x0 = b.y / b.x
            out = out + c * self.torus_factor(t) * self.phi_table(w2, x0)
        return out

    __call__ = eval

    # -- the independent slow route (oracle for tests) --------------------------
    def eval_reference(self, section: Section, extra_depth: int = 2) -> Scalar:
        """Direct annulus-by-annulus summation through Section.eval, with the
        two tails closed from the stabilized multiplicative regimes.  Shares no
        code path with the Tate engine past the section evaluator."""
        ctx = self.ctx
        p, q = ctx.p, ctx.q
        D = section.level_bound() + max(1, self.chtil.c) + extra_depth
        prec = D
        units = units_mod(p, prec)
        cmass = Fraction(1, (q - 1) * q ** (prec - 1))
        X = self.chtil.value_at_pi
        wbar = GroupElement.w(p)
        out = ctx.zero()
        annuli = {}
        for k in range(-D, D + 1):
            acc = ctx.zero()
            for eps in units:
                y = PadicRational(Fraction(eps * p**k) if k >= 0 else Fraction(eps, p**-k), p)
                v = section.eval(wbar * GroupElement.upper(p, y.value))
                if not v.is_zero():
                    acc = acc + v * self._chtil_unit(eps)
            annuli[k] = acc * ctx.scalar(cmass)
            out = out + annuli[k] * X**k
        # positive tail: the integrand is constant once n(y) is that deep
        if self.chtil.c == 0:
            out = out + section.eval(wbar) * X.geometric_tail(D + 1)
        # negative tail: verified geometric continuation of the last annuli
        a2, a1, a0 = annuli[-D], annuli[-D + 1], annuli[-D + 2]
        if a1.is_zero():
            if not (a2.is_zero() and a0.is_zero()):
                raise FunctionalError("tail not stabilized by depth cap (reference route)")
        else:
            rho = a2 / a1
            if not (a1 * a1 == a0 * a2):
                raise FunctionalError("tail not stabilized by depth cap (reference route)")
            ratio = rho * X.inverse()  # per downward step multiplier
            out = out + annuli[-D] * (X ** (-D)) * ratio.geometric_tail(1)
        return out


# ---------------------------------------------------------------------------
# compactly induced functions on T\G and the Phi integral
# ---------------------------------------------------------------------------


class CompactInducedFn:
    """f(t k) = (chi_1/chi_2)(t) on a union of unit-orbit cells of T\\G.

    Well-defined because chi_1/chi_2 is unramified, hence trivial on T cap K;
    support is all of T I(n) for the indicator, or a subset of
    (T cap K)\\I(n)/K(m) orbits for the random compactly supported inputs.
    """

    def __init__(self, ctx: Context, mu1: SmoothCharacter, mu2: SmoothCharacter, n: int, level: int, support=None):
        if not (mu1.is_unramified() and mu2.is_unramified()):
            raise FunctionalError("chi_1/chi_2 must be trivial on T cap K: unramified data required")
        if n < 1 or level < n:
            raise FunctionalError("need level >= n >= 1")
        self.ctx = ctx
        self.mu1 = mu1
        self.mu2 = mu2
        self.ratio12 = mu1 / mu2
        self.n = n
        self.level = level
        self.support = None if support is None else frozenset(support)

    def eval(self, g: GroupElement) -> Scalar:
        fac = in_T_In(g, self.n)
        if fac is None:
            return self.ctx.zero()
        t, k = fac
        if self.support is not None:
            if iwahori_orbit_key(self.ctx, k, self.n, self.level) not in self.support:
                return self.ctx.zero()
        return self.ratio12.eval(t.x / t.t)

    __call__ = eval

    def orbit_cells(self):
        table = torus_orbit_reps(self.ctx, self.n, self.level)
        for rep, wt in zip(table.reps, table.weights):
            if self.support is not None:
                if iwahori_orbit_key(self.ctx, rep, self.n, self.level) not in self.support:
                    continue
            yield rep, wt


def make_indicator_f(ctx: Context, mu1: SmoothCharacter, mu2: SmoothCharacter, n: int, level: int | None = None) -> CompactInducedFn:
    return CompactInducedFn(ctx, mu1, mu2, n, level if level is not None else max(n, 1))


def Phi_eval(phi: TorusFunctional, f: CompactInducedFn, v: Section) -> Scalar:
    """Phi(f)(v) = integral over T\\G of f(g) phi(pi(g) v) dg, a finite sum
    over the unit-orbit cells with the fixed measure conventions."""
    ctx = phi.ctx
    out = ctx.zero()
    for rep, wt in f.orbit_cells():
        fv = f.eval(rep)
        if fv.is_zero():
            continue
        out = out + ctx.scalar(wt) * fv * phi.eval(v.translated(rep))
    return out


def coset_constant(ctx: Context, n: int) -> Fraction:
    """The convention-determined lambda: the T\\G mass of the unit orbit, 1/[K:I(n)]."""
    from .cosets import p1_size

    return Fraction(1, p1_size(ctx.p, n))
