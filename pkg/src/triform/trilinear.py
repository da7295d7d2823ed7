"""The invariant trilinear form: two independent evaluators and the maps of
the orbit exact sequence (ext from the open orbit, res to the diagonal).

ell_chain realizes ell(F (x) v) as the regularized open-orbit integral
  integral over T\\G of F(g, wg) phi(pi(g) v) dg,
parameterized by ordered pairs of projective points via the bottom-row section
matrix; pairs at unit distance are an exact finite sum, near-diagonal strata
collapse to (cell, depth, unit-class) sums closed by verified geometric tails.

ell_kernel is the independent oracle: a triple (P^1)^3 integral against a
product of pair characters of the wedge values, the three characters derived
at build time from the equivariance constraints.
"""

from __future__ import annotations

from fractions import Fraction

from .characters import BorelCharacter, SmoothCharacter
from .context import Context
from .cosets import p1_table, units_mod
from .functionals import CompactInducedFn, FunctionalError, TorusFunctional
from .matrices import GroupElement, iwasawa
from .models import InducedModel, Section, TableSection
from .scalars import Scalar


class TailError(FunctionalError):
    pass


class KernelUnsupportedError(FunctionalError):
    pass


class TensorFn:
    """A finite sum of pure tensors in V1 (x) V2, with an optional pair-table
    backing (the shape ext produces) for O(1) pair evaluation."""

    def __init__(self, ctx: Context, terms, pair_table=None):
        self.ctx = ctx
        self.terms = tuple(terms)
        self.pair_table = pair_table  # (level, model1, model2, rows)

    @classmethod
    def pure(cls, ctx: Context, coeff, s1: Section, s2: Section) -> "TensorFn":
        return cls(ctx, ((ctx.scalar(coeff), s1, s2),))

    @classmethod
    def from_pair_table(cls, ctx: Context, level: int, model1: InducedModel, model2: InducedModel, rows) -> "TensorFn":
        terms = []
        one = ctx.one()
        for c1, row in enumerate(rows):
            if all(v.is_zero() for v in row):
                continue
            left = model1.delta_section(level, c1).as_section()
            right = TableSection(model2, level, row).as_section()
            terms.append((one, left, right))
        return cls(ctx, tuple(terms), pair_table=(level, model1, model2, rows))

    def eval_pair(self, g1: GroupElement, g2: GroupElement) -> Scalar:
        if self.pair_table is not None:
            level, model1, model2, rows = self.pair_table
            b1, k1 = iwasawa(g1)
            j1, tw1 = model1.cell_value_factor(k1, level)
            row = rows[j1]
            if all(v.is_zero() for v in row):
                return self.ctx.zero()
            b2, k2 = iwasawa(g2)
            j2, tw2 = model2.cell_value_factor(k2, level)
            v = row[j2]
            if v.is_zero():
                return self.ctx.zero()
            return model1.borel.eval(b1) * tw1 * model2.borel.eval(b2) * tw2 * v
        out = self.ctx.zero()
        for c, s1, s2 in self.terms:
            if c.is_zero():
                continue
            v1 = s1.eval(g1)
            if v1.is_zero():
                continue
            out = out + c * v1 * s2.eval(g2)
        return out

    def translated(self, g: GroupElement) -> "TensorFn":
        """The diagonal action of g on V1 (x) V2."""
        if self.pair_table is not None:
            return TensorFn(self.ctx, self.terms).translated(g)
        return TensorFn(self.ctx, tuple((c, s1.translated(g), s2.translated(g)) for c, s1, s2 in self.terms))

    def scaled(self, c) -> "TensorFn":
        c = self.ctx.scalar(c)
        pt = None
        if self.pair_table is not None:
            level, m1, m2, rows = self.pair_table
            pt = (level, m1, m2, [[c * v for v in row] for row in rows])
        return TensorFn(self.ctx, tuple((c * c0, s1, s2) for c0, s1, s2 in self.terms), pt)

    def __add__(self, other: "TensorFn") -> "TensorFn":
        return TensorFn(self.ctx, self.terms + other.terms)

    def level_bound(self) -> int:
        if self.pair_table is not None:
            return self.pair_table[0]
        out = 1
        for _, s1, s2 in self.terms:
            out = max(out, s1.level_bound(), s2.level_bound())
        return out


def ext(f: CompactInducedFn, model1: InducedModel, model2: InducedModel, level: int | None = None) -> TensorFn:
    """The open-orbit injection: the tensor F with F(g, wg) = f(g), vanishing
    on the diagonal orbit, reconstructed from its pair table."""
    ctx = f.ctx
    lvl = max(level or 0, f.level, f.n, 1)
    table = p1_table(ctx, lvl)
    reps = table.reps
    w = GroupElement.w(ctx.p)
    rows = []
    for rep1 in reps:
        row = []
        for rep2 in reps:
            # the section matrix built from the two bottom rows lies in T I(n)
            # only if its determinant is a unit, so near pairs contribute 0
            det = rep2.z * rep1.t - rep2.t * rep1.z
            if det.is_zero() or det.val() != 0:
                row.append(ctx.zero())
                continue
            sigma = GroupElement(ctx.p, rep2.z, rep2.t, rep1.z, rep1.t)
            fv = f.eval(sigma)
            if fv.is_zero():
                row.append(ctx.zero())
                continue
            b1 = rep1 * sigma.inv()
            b2 = rep2 * (w * sigma).inv()
            row.append(model1.borel.eval(b1) * model2.borel.eval(b2) * fv)
        rows.append(row)
    return TensorFn.from_pair_table(ctx, lvl, model1, model2, rows)


def closed_form_tensor(ctx: Context, mu1: SmoothCharacter, mu2: SmoothCharacter, v1: Section, v2: Section, n: int) -> TensorFn:
    """The closed form A * v1' (x) v2' with A = a^n/((a^2-1)(b^2-1)),
    v1' = a gamma^{-(n-1)} v1 - gamma^{-n} v1, v2' = b gamma^{-1} v2 - v2,
    where a, b are the Satake-type values mu_i(pi)/sqrt(q)."""
    a = mu1.value_at_pi / ctx.r
    b = mu2.value_at_pi / ctx.r
    A = a**n / ((a * a - ctx.one()) * (b * b - ctx.one()))
    v1p = v1.translated(GroupElement.gamma(ctx.p, -(n - 1))).scaled(a) - v1.translated(GroupElement.gamma(ctx.p, -n))
    v2p = v2.translated(GroupElement.gamma(ctx.p, -1)).scaled(b) - v2
    return TensorFn.pure(ctx, A, v1p, v2p)


class DiagonalRestriction:
    """res(F): the function g -> F(g, g), a vector of Ind(chi_1 chi_2 delta^{1/2})."""

    def __init__(self, F: TensorFn, mu1: SmoothCharacter, mu2: SmoothCharacter):
        self.F = F
        self.ctx = F.ctx
        prod = mu1 * mu2
        self.borel = BorelCharacter(prod, prod.inverse(), half_delta=True)

    def eval(self, g: GroupElement) -> Scalar:
        return self.F.eval_pair(g, g)

    __call__ = eval


def res_diag(F: TensorFn, mu1: SmoothCharacter, mu2: SmoothCharacter) -> DiagonalRestriction:
    return DiagonalRestriction(F, mu1, mu2)


def simple_case_pairing(res: DiagonalRestriction, v3: Section, level: int | None = None) -> Scalar:
    """The K-integral pairing of res(F) against a Steinberg vector; this is
    the natural surjection route available exactly when mu1 mu2 = |.|^{-1}."""
    ctx = res.ctx
    if res.borel.chi_a.c != 0 or not (res.borel.chi_a.value_at_pi == ctx.scalar(ctx.q)):
        raise FunctionalError("simple-case pairing needs mu1 mu2 |.|^{1/2} = |.|^{-1/2}")
    if not v3.model.steinberg:
        raise FunctionalError("simple-case pairing needs a Steinberg third vector")
    lvl = max(level or 0, res.F.level_bound(), v3.level_bound(), 1)
    table = p1_table(ctx, lvl)
    mass = ctx.scalar(table.cell_mass)
    out = ctx.zero()
    for rep in table.reps:
        rv = res.eval(rep)
        if not rv.is_zero():
            out = out + mass * rv * v3.eval(rep)
    return out


# ---------------------------------------------------------------------------
# the chain evaluator: regularized open-orbit quadrature
# ---------------------------------------------------------------------------


def ell_chain(phi: TorusFunctional, F: TensorFn, v: Section, depth_margin: int = 2, depth_cap: int = 24) -> Scalar:
    """ell(F (x) v) by pair-of-cells quadrature with near-diagonal closure.

    Weights: c_K = (p+1)/p normalizes the unit-distance region to total mass
    1 = mass((T cap K)\\K); the near-diagonal stratum (cell, depth e, unit
    class mod p^R) carries weight cell_mass * q^{e-R}.
    """
    ctx = phi.ctx
    p, q = ctx.p, ctx.q
    model3 = phi.model3
    extra = max(1, phi.chtil.c, (model3.borel.chi_d / model3.borel.chi_a).c)
    Lstar = max(F.level_bound(), v.level_bound(), model3.min_level, 1)
    table = p1_table(ctx, Lstar)
    w = GroupElement.w(p)

    def phi_translate(sigma: GroupElement) -> Scalar:
        return phi.eval(v.translated(sigma))

    # unit-distance pairs: an exact finite sum
    total = ctx.zero()
    w0 = ctx.scalar(Fraction(p + 1, p) * table.cell_mass * table.cell_mass)
    for rep1 in table.reps:
        for rep2 in table.reps:
            det = rep2.z * rep1.t - rep2.t * rep1.z
            if det.is_zero() or det.val() != 0:
                continue
            sigma = GroupElement(p, rep2.z, rep2.t, rep1.z, rep1.t)
            Fv = F.eval_pair(sigma, w * sigma)
            if not Fv.is_zero():
                total = total + w0 * Fv * phi_translate(sigma)

    # near-diagonal strata, collapsed to (cell, e, eta mod p^R).  Everything
    # that does not move with the offset s is hoisted per cell: sigma = b_s rep
    # has the bottom row of rep, so the Iwasawa K-part of sigma g is that of
    # rep g, and only the upper-triangular factor picks up s.
    #
    # R must resolve (a) every section's right-invariance level (Lstar) and
    # (b) the unit key of the Tate argument x0, stable mod p^{R} once
    # R >= (v-table level) + extra; both bounds are exact.
    mv = max((tbl.level for _, _, tbl in v.terms), default=1)
    R = max(Lstar, mv + extra)
    e0 = R + 1
    e_top = e0 + depth_margin
    if e_top > depth_cap:
        raise TailError(f"depth cap {depth_cap} below the structural stabilization depth {e_top}")
    units = units_mod(p, R)
    identity = GroupElement.identity(p)

    def mul_bs(s, bh: GroupElement) -> GroupElement:
        # (s 1; 0 1) * bh for upper-triangular bh
        return GroupElement(p, s * bh.x.value, s * bh.y.value + bh.t.value, 0, bh.t.value)

    cell_pre = []
    for rep in table.reps:
        phi_pre = []
        for c, g, tbl in v.terms:
            bh, kh = iwasawa(rep * g)
            w2 = tbl if kh == identity else tbl.translate_K(kh)
            phi_pre.append((c, bh, w2))
        s1_pre = None
        if F.pair_table is None:
            s1_pre = []
            for cF, sec1, sec2 in F.terms:
                parts = []
                for c1, g1, t1 in sec1.terms:
                    bh1, kh1 = iwasawa(rep * g1)
                    val1 = t1.value_at_K(kh1)
                    cv = c1 * val1
                    if not cv.is_zero():
                        parts.append((cv, bh1, sec1.model.borel))
                # the second slot sees w sigma g2 = (0 1; s 1) (rep g2)
                parts2 = [(c2, rep * g2, t2) for c2, g2, t2 in sec2.terms]
                s1_pre.append((cF, parts, parts2))
        cell_pre.append((rep, phi_pre, s1_pre))

    depth_sums: dict[int, Scalar] = {}
    for e in range(1, e_top + 1):
        acc = ctx.zero()
        for eta in units:
            s = Fraction(eta * p**e)
            bs = GroupElement(p, s, 1, 0, 1)
            for rep, phi_pre, s1_pre in cell_pre:
                sigma = bs * rep
                # F(sigma, w sigma)
                if s1_pre is None:
                    Fv = F.eval_pair(sigma, w * sigma)
                else:
                    Fv = ctx.zero()
                    for cF, parts, parts2 in s1_pre:
                        if not parts:
                            continue
                        v1 = ctx.zero()
                        for cv, bh1, borel1 in parts:
                            v1 = v1 + cv * borel1.eval(mul_bs(s, bh1))
                        if v1.is_zero():
                            continue
                        v2 = ctx.zero()
                        for c2, h2, t2 in parts2:
                            m2 = GroupElement(
                                p,
                                h2.z.value,
                                h2.t.value,
                                s * h2.x.value + h2.z.value,
                                s * h2.y.value + h2.t.value,
                            )
                            v2 = v2 + c2 * t2.eval(m2)
                        if not v2.is_zero():
                            Fv = Fv + cF * v1 * v2
                if Fv.is_zero():
                    continue
                # phi(pi(sigma) v), with the K-part hoisted per cell
                pv = ctx.zero()
                for c, bh, w2 in phi_pre:
                    bfull = mul_bs(s, bh)
                    t = GroupElement.diag(p, bfull.x, bfull.t)
                    x0 = bfull.y / bfull.x
                    pv = pv + c * phi.torus_factor(t) * phi.phi_table(w2, x0)
                acc = acc + Fv * pv
        depth_sums[e] = ctx.scalar(table.cell_mass * Fraction(q**e, q**R)) * acc
        total = total + depth_sums[e]

    s0, s1, s2 = depth_sums[e0], depth_sums[e0 + 1], depth_sums[e0 + 2]
    if s1.is_zero():
        if not (s0.is_zero() and s2.is_zero()):
            raise TailError(
                "tail not stabilized by depth cap (depths %d..%d: %s | %s | %s)"
                % (e0, e0 + 2, s0.render(), s1.render(), s2.render())
            )
        return total
    if not (s1 * s1 == s0 * s2):
        raise TailError(f"tail not stabilized by depth cap (depths {e0}..{e0+2} not in geometric progression)")
    rho = s2 / s1
    return total + s2 * rho.geometric_tail(1)


# ---------------------------------------------------------------------------
# the kernel evaluator: independent (P^1)^3 quadrature
# ---------------------------------------------------------------------------


def derive_kernel_characters(ctx: Context, mu1: SmoothCharacter, mu2: SmoothCharacter, mu3: SmoothCharacter):
    """Solve the equivariance constraints for the three pair characters.

    The per-point cocycle matching forces nu_ij nu_ik = mu_i^2 |.|^{-1} for
    each point i, and the determinant matching forces the product of all three
    to be mu_1 mu_2 mu_3 |.|^{-3/2}; both together pin the solution, which is
    assembled and re-verified here (no hardcoded exponents).
    """
    norm1 = SmoothCharacter.norm_power_half(ctx, -2)  # |.|^{-1}
    E = [mu1 * mu1 * norm1, mu2 * mu2 * norm1, mu3 * mu3 * norm1]
    D = mu1 * mu2 * mu3 * SmoothCharacter.norm_power_half(ctx, -3)
    nu12 = D / E[2]
    nu13 = D / E[1]
    nu23 = D / E[0]
    ok = (nu12 * nu13 == E[0]) and (nu12 * nu23 == E[1]) and (nu13 * nu23 == E[2]) and (nu12 * nu13 * nu23 == D)
    if not ok:
        raise KernelUnsupportedError("kernel exponent derivation inconsistent for this character data")
    return nu12, nu13, nu23


class KernelForm:
    """The triple-integral realization of ell on principal-series data."""

    def __init__(self, ctx: Context, mu1: SmoothCharacter, mu2: SmoothCharacter, model3: InducedModel):
        if model3.steinberg:
            raise KernelUnsupportedError("unsupported model for kernel route: Steinberg input")
        mu3 = model3.borel.chi_a
        if mu3.is_unramified():
            raise KernelUnsupportedError("kernel route expects a ramified third representation")
        self.ctx = ctx
        self.mu1, self.mu2, self.mu3 = mu1, mu2, mu3
        self.model3 = model3
        self.nu12, self.nu13, self.nu23 = derive_kernel_characters(ctx, mu1, mu2, mu3)
        self.c0 = max(self.nu12.c, self.nu13.c, self.nu23.c, 1)
        if self.c0 > 1:
            raise KernelUnsupportedError("unsupported model for kernel route: pair characters of conductor exponent > 1")
        self._g_cache: dict = {}

    # -- closed-form helpers ---------------------------------------------------
    def _usum(self, chars_signs) -> Scalar:
        """(1/q) * sum over units mod p of a product of unit characters."""
        ctx = self.ctx
        out = ctx.zero()
        for eps in range(1, ctx.p):
            term = ctx.one()
            for ch, sgn in chars_signs:
                term = term * ctx.scalar(ch.unit_image((sgn * eps) % ctx.p))
            out = out + term
        return out * ctx.scalar(Fraction(1, ctx.q))

    def _G(self, sgn: int, lam: int) -> Scalar:
        """The universal collision integral over val(s), val(s') >= lam of
        nu12(sgn s) nu13(sgn s') nu23(sgn (s'-s)), flat dz^2 measure, times
        the chart density (p/(p+1))^2."""
        key = (sgn, lam)
        if key in self._g_cache:
            return self._g_cache[key]
        ctx = self.ctx
        q = ctx.q
        qs = ctx.scalar(q)
        X12, X13, X23 = self.nu12.value_at_pi, self.nu13.value_at_pi, self.nu23.value_at_pi
        # val s < val s': the difference sits with s, unit -sgn eps
        UA = self._usum([(self.nu12, sgn), (self.nu23, -sgn)])
        UB = self._usum([(self.nu13, sgn)])
        gA = X13 / qs
        part_a = UA * UB * gA.geometric_tail(1) * ((X12 * X23 / qs) * gA).geometric_tail(lam)
        # val s' < val s: the difference sits with s', unit +sgn eps'
        UA2 = self._usum([(self.nu13, sgn), (self.nu23, sgn)])
        UB2 = self._usum([(self.nu12, sgn)])
        gB = X12 / qs
        part_b = UA2 * UB2 * gB.geometric_tail(1) * ((X13 * X23 / qs) * gB).geometric_tail(lam)
        # equal valuations: split by the collision depth of the unit parts
        C0 = ctx.zero()
        for e1 in range(1, ctx.p):
            for e2 in range(1, ctx.p):
                if (e1 - e2) % ctx.p == 0:
                    continue
                C0 = C0 + (
                    ctx.scalar(self.nu12.unit_image((sgn * e1) % ctx.p))
                    * ctx.scalar(self.nu13.unit_image((sgn * e2) % ctx.p))
                    * ctx.scalar(self.nu23.unit_image((sgn * (e2 - e1)) % ctx.p))
                )
        C0 = C0 * ctx.scalar(Fraction(1, q * q))
        C1 = self._usum([(self.nu12, sgn), (self.nu13, sgn)]) * self._usum([(self.nu23, sgn)])
        rho_diag = (X12 * X13 * X23) / (qs * qs)
        part_c = (C0 + C1 * (X23 / qs).geometric_tail(1)) * rho_diag.geometric_tail(lam)
        out = (part_a + part_b + part_c) * ctx.scalar(Fraction(ctx.p, ctx.p + 1) ** 2)
        self._g_cache[key] = out
        return out

    # -- the evaluator -----------------------------------------------------------
    def eval(self, f1: Section, f2: Section, f3: Section) -> Scalar:
        ctx = self.ctx
        p, q = ctx.p, ctx.q
        L0 = max(f1.level_bound(), f2.level_bound(), f3.level_bound(), self.model3.min_level, 1)
        ctx.check_level(L0)
        t1, t2, t3 = f1.as_table(L0), f2.as_table(L0), f3.as_table(L0)
        table = p1_table(ctx, L0)
        N = table.size
        rows = [(rep.z, rep.t) for rep in table.reps]
        # wedge(bottom row, offset direction) = -det(rep) = -1 for det-one lifts
        signs = [int(-(rep.det().value)) for rep in table.reps]
        mass = ctx.scalar(table.cell_mass)
        vals1, vals2, vals3 = t1.values, t2.values, t3.values

        def wedge(i: int, j: int):
            zi, ti = rows[i]
            zj, tj = rows[j]
            return zi * tj - ti * zj

        # pair-character value tables on distinct cells
        W12 = [[None] * N for _ in range(N)]
        W13 = [[None] * N for _ in range(N)]
        W23 = [[None] * N for _ in range(N)]
        for i in range(N):
            for j in range(N):
                if i == j:
                    continue
                wd = wedge(i, j)
                W12[i][j] = self.nu12.eval(wd)
                W13[i][j] = self.nu13.eval(wd)
                W23[i][j] = self.nu23.eval(wd)

        # stratum (i): three pairwise distinct cells
        s_i = ctx.zero()
        for i in range(N):
            v1 = vals1[i]
            if v1.is_zero():
                continue
            for j in range(N):
                if j == i:
                    continue
                v2 = vals2[j]
                if v2.is_zero():
                    continue
                v12 = v1 * v2 * W12[i][j]
                for k in range(N):
                    if k == i or k == j:
                        continue
                    v3 = vals3[k]
                    if not v3.is_zero():
                        s_i = s_i + v12 * v3 * W13[i][k] * W23[j][k]
        total = s_i * mass * mass * mass

        # stratum (ii): one pair collapses inside a cell, the third stays away
        pair_density = ctx.scalar(Fraction(p, p + 1))
        cases = [
            (self.nu12, vals1, vals2, vals3, lambda c, k: (W13[c][k], W23[c][k])),
            (self.nu13, vals1, vals3, vals2, lambda c, k: (W12[c][k], W23[k][c])),
            (self.nu23, vals2, vals3, vals1, lambda c, k: (W12[k][c], W13[k][c])),
        ]
        for nu_pair, va, vb, vthird, far in cases:
            tail = (nu_pair.value_at_pi / ctx.scalar(q)).geometric_tail(L0)
            us = {s: self._usum([(nu_pair, s)]) for s in (1, -1)}
            for c in range(N):
                fv = va[c] * vb[c]
                if fv.is_zero():
                    continue
                base = fv * us[signs[c]] * tail
                if base.is_zero():
                    continue
                for k in range(N):
                    if k == c:
                        continue
                    v3 = vthird[k]
                    if v3.is_zero():
                        continue
                    wx, wy = far(c, k)
                    total = total + base * v3 * wx * wy * mass * mass * pair_density

        # stratum (iii): all three points in one cell
        for c in range(N):
            fv = vals1[c] * vals2[c] * vals3[c]
            if not fv.is_zero():
                total = total + fv * mass * self._G(signs[c], L0)
        return total


def ell_kernel(kform: KernelForm, f1: Section, f2: Section, f3: Section) -> Scalar:
    return kform.eval(f1, f2, f3)
