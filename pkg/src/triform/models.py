"""Finite-level models of the representations in play.

An InducedModel is the space of functions f(bg) = chi(b) delta(b)^{1/2} f(g)
on G, smooth under right translation.  A level-m TableSection stores values on
the P^1(O/p^m) cells; a Section is a formal sum of right-translates of table
sections, so group translation is exact and never forces a table rebuild.
The Steinberg model is the zero-K-average subspace of the induced model at the
special parameter point (|.|^{1/2}, |.|^{-1/2}).
"""

from __future__ import annotations

from fractions import Fraction

from .characters import BorelCharacter, SmoothCharacter, unit_group_generators
from .context import Context
from .cosets import p1_table
from .matrices import GroupElement, iwasawa
from .scalars import Scalar


class ModelError(Exception):
    pass


class NewVectorError(ModelError):
    """The fixed-space solve returned a dimension other than one."""


class InducedModel:
    def __init__(self, ctx: Context, borel: BorelCharacter, tag: str = "", steinberg: bool = False):
        if not borel.half_delta:
            raise ModelError("induced models are normalized: the delta^{1/2} twist must be on")
        self.ctx = ctx
        self.borel = borel
        self.tag = tag or f"Ind({borel.chi_a.render_spec()}, {borel.chi_d.render_spec()})"
        self.steinberg = steinberg
        self.min_level = max(1, borel.conductor())

    # -- the admissibility mask -------------------------------------------
    def admissible_mask(self, level: int) -> list[bool]:
        """Cells whose (B cap K)-stabilizer twist is trivial.

        The stabilizer {b : rep^{-1} b rep in K(level)} pins b = 1 mod p^level
        on every cell, so the mask is uniform: everything is admissible once
        level >= conductor, nothing below.  (The K/K(m) full-table oracle in
        the test suite checks this against brute force.)
        """
        n_cells = len(p1_table(self.ctx, level).reps)
        ok = level >= self.borel.conductor()
        return [ok] * n_cells

    def require_level(self, level: int):
        if level < self.min_level:
            raise ModelError(
                f"refine level: level {level} cannot carry sections of {self.tag} (needs >= {self.min_level})"
            )

    # -- cell lookup with its unit twist ------------------------------------
    def cell_value_factor(self, k: GroupElement, level: int) -> tuple[int, Scalar]:
        """For k in K: the cell index j and the twist s with f(k) = s * f(rep_j)."""
        table = p1_table(self.ctx, level)
        j = table.cell_of(k)
        c = self.borel.conductor()
        if c == 0:
            return j, self.ctx.one()
        h = k * table.reps[j].inv()
        tw = self.borel.diag_units_image(h.x.unit_residue(c), h.t.unit_residue(c))
        return j, self.ctx.scalar(tw)

    def section(self, level: int, values) -> "TableSection":
        return TableSection(self, level, values)

    def delta_section(self, level: int, cell: int) -> "TableSection":
        vals = [self.ctx.zero()] * len(p1_table(self.ctx, level).reps)
        vals[cell] = self.ctx.one()
        return TableSection(self, level, vals)

    def __repr__(self):
        return f"InducedModel<{self.tag}>"


def principal_series_model(ctx: Context, mu: SmoothCharacter, tag: str = "") -> InducedModel:
    return InducedModel(ctx, BorelCharacter(mu, mu.inverse(), half_delta=True), tag=tag)


def steinberg_model(ctx: Context) -> InducedModel:
    """Normalized induction at (|.|^{1/2}, |.|^{-1/2}); Sp is the zero-average subspace."""
    chi_a = SmoothCharacter.norm_power_half(ctx, 1)
    chi_d = SmoothCharacter.norm_power_half(ctx, -1)
    return InducedModel(ctx, BorelCharacter(chi_a, chi_d, half_delta=True), tag="Steinberg", steinberg=True)


class TableSection:
    """A level-m section: Scalar values on the P^1(O/p^m) cells."""

    __slots__ = ("model", "level", "values")

    def __init__(self, model: InducedModel, level: int, values):
        model.require_level(level)
        n = len(p1_table(model.ctx, level).reps)
        values = [model.ctx.scalar(v) for v in values]
        if len(values) != n:
            raise ModelError(f"expected {n} cell values, got {len(values)}")
        mask = model.admissible_mask(level)
        for ok, v in zip(mask, values):
            if not ok and not v.is_zero():
                raise ModelError("value on a masked cell must be 0")
        self.model = model
        self.level = level
        self.values = values

    @property
    def ctx(self) -> Context:
        return self.model.ctx

    def value_at_K(self, k: GroupElement) -> Scalar:
        j, tw = self.model.cell_value_factor(k, self.level)
        v = self.values[j]
        return v if tw.is_one() else tw * v

    def eval(self, g: GroupElement) -> Scalar:
        b, k = iwasawa(g)
        return self.model.borel.eval(b) * self.value_at_K(k)

    def translate_K(self, k: GroupElement) -> "TableSection":
        """The right translate by k in K, again at the same level."""
        if not k.in_K():
            raise ModelError("table translation needs k in K; use Section for general g")
        reps = p1_table(self.ctx, self.level).reps
        return TableSection(self.model, self.level, [self.value_at_K(rep * k) for rep in reps])

    def refine(self, level: int) -> "TableSection":
        if level < self.level:
            raise ModelError("refinement must not lose level")
        reps = p1_table(self.ctx, level).reps
        return TableSection(self.model, level, [self.value_at_K(rep) for rep in reps])

    def k_average(self) -> Scalar:
        """Integral over K (unramified models only: ramified cells average to 0)."""
        if self.model.borel.conductor() != 0:
            raise ModelError("K-average is only computed on unramified-twist models")
        mass = self.ctx.scalar(p1_table(self.ctx, self.level).cell_mass)
        out = self.ctx.zero()
        for v in self.values:
            out = out + v
        return mass * out

    def scaled(self, c: Scalar) -> "TableSection":
        return TableSection(self.model, self.level, [c * v for v in self.values])

    def __add__(self, other: "TableSection") -> "TableSection":
        if other.model is not self.model or other.level != self.level:
            raise ModelError("table addition needs matching model and level")
        return TableSection(self.model, self.level, [x + y for x, y in zip(self.values, other.values)])

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def dump(self) -> str:
        """Deterministic cell -> scalar dump: `cell (z:t) -> scalar`."""
        table = p1_table(self.ctx, self.level)
        lines = []
        for (chart, key), v in zip(table.coords, self.values):
            zt = f"({key}:1)" if chart == 0 else f"(1:{key})"
            lines.append(f"cell {zt} -> {v.render()}")
        return "\n".join(lines)

    def as_section(self) -> "Section":
        return Section(self.model, ((self.ctx.one(), GroupElement.identity(self.ctx.p), self),))


class Section:
    """A finite formal sum  sum_i c_i * (right-translate by g_i of a table).

    Evaluation is exact: eval(x) = sum c_i * table_i(x * g_i).  Translation by
    any group element is lazy, so no level management is ever needed for
    evaluation; a table is materialized only on demand (as_table), at a level
    that guarantees right K(level)-invariance.
    """

    __slots__ = ("model", "terms")

    def __init__(self, model: InducedModel, terms):
        self.model = model
        self.terms = tuple((c, g, t) for (c, g, t) in terms)

    @property
    def ctx(self) -> Context:
        return self.model.ctx

    def eval(self, x: GroupElement) -> Scalar:
        out = self.ctx.zero()
        for c, g, tbl in self.terms:
            if c.is_zero():
                continue
            out = out + c * tbl.eval(x * g)
        return out

    def translated(self, h: GroupElement) -> "Section":
        """The right-translation action: result(x) = self(x * h)."""
        return Section(self.model, tuple((c, h * g, tbl) for c, g, tbl in self.terms))

    def __add__(self, other: "Section") -> "Section":
        if other.model is not self.model:
            raise ModelError("section addition needs a common model")
        return Section(self.model, self.terms + other.terms)

    def __sub__(self, other: "Section") -> "Section":
        return self + other.scaled(self.ctx.scalar(-1))

    def scaled(self, c) -> "Section":
        c = self.ctx.scalar(c)
        return Section(self.model, tuple((c * c0, g, t) for c0, g, t in self.terms))

    def level_bound(self) -> int:
        """A level at which the section is right-K(level)-invariant."""
        out = 1
        for _, g, tbl in self.terms:
            out = max(out, tbl.level + g.cartan_gap())
        return out

    def as_table(self, level: int | None = None) -> TableSection:
        lvl = level if level is not None else self.level_bound()
        self.ctx.check_level(lvl)
        if lvl < self.level_bound():
            raise ModelError(f"refine level: need >= {self.level_bound()}, got {lvl}")
        reps = p1_table(self.ctx, lvl).reps
        return TableSection(self.model, lvl, [self.eval(rep) for rep in reps])

    def zero_like(self) -> "Section":
        return Section(self.model, ())


def sections_equal(s1: Section, s2: Section, level: int | None = None) -> bool:
    lvl = level if level is not None else max(s1.level_bound(), s2.level_bound())
    t1 = s1.as_table(lvl)
    t2 = s2.as_table(lvl)
    return all((x - y).is_zero() for x, y in zip(t1.values, t2.values))


# ---------------------------------------------------------------------------
# fixed vectors under the congruence subgroups, and conductors
# ---------------------------------------------------------------------------


def iwahori_generators(ctx: Context, n: int, level: int) -> list[GroupElement]:
    """Generators of I(n) modulo K(level) (of K itself when n = 0)."""
    p = ctx.p
    gens: list[GroupElement] = [GroupElement.upper(p, 1)]
    for g, _ in unit_group_generators(p, level):
        gens.append(GroupElement.diag(p, g, 1))
        gens.append(GroupElement.diag(p, 1, g))
    if n == 0:
        gens.append(GroupElement.w(p))
        gens.append(GroupElement.lower(p, 1))
    else:
        gens.append(GroupElement.lower(p, p**n))
    return gens


def _kernel_basis(ctx: Context, rows: list, ncols: int) -> list:
    """Kernel of the row system over the Scalar field (exact Gaussian elimination)."""
    mat = [list(r) for r in rows]
    pivots: dict[int, int] = {}
    rank_rows: list[list[Scalar]] = []
    for row in mat:
        cur = list(row)
        for col, rr in pivots.items():
            if not cur[col].is_zero():
                f = cur[col]
                cur = [x - f * y for x, y in zip(cur, rank_rows[rr])]
        lead = next((j for j in range(ncols) if not cur[j].is_zero()), None)
        if lead is None:
            continue
        inv = cur[lead].inverse()
        cur = [inv * x for x in cur]
        # eliminate the new pivot from earlier rows
        for rr, prev in enumerate(rank_rows):
            if not prev[lead].is_zero():
                f = prev[lead]
                rank_rows[rr] = [x - f * y for x, y in zip(prev, cur)]
        pivots[lead] = len(rank_rows)
        rank_rows.append(cur)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for j in free:
        vec = [ctx.zero()] * ncols
        vec[j] = ctx.one()
        for col, rr in pivots.items():
            vec[col] = -rank_rows[rr][j]
        basis.append(vec)
    return basis


def fixed_space(model: InducedModel, n: int, level: int | None = None) -> list:
    """Basis of the I(n)-fixed vectors in the level-`level` table space.

    For the Steinberg model the zero-K-average condition is part of the
    system, so the answer lives in Sp itself.
    """
    ctx = model.ctx
    lvl = max(level or 0, n, model.min_level, 1)
    ctx.check_level(lvl)
    reps = p1_table(ctx, lvl).reps
    ncols = len(reps)
    mask = model.admissible_mask(lvl)
    rows = []
    one = ctx.one()
    for gen in iwahori_generators(ctx, n, lvl):
        for i, rep in enumerate(reps):
            j, tw = model.cell_value_factor(rep * gen, lvl)
            # fixed vector: v[i] - tw * v[j] = 0
            row = [ctx.zero()] * ncols
            row[i] = row[i] + one
            row[j] = row[j] - tw
            rows.append(row)
    for i, ok in enumerate(mask):
        if not ok:
            row = [ctx.zero()] * ncols
            row[i] = one
            rows.append(row)
    if model.steinberg:
        rows.append([one] * ncols)  # zero K-average cuts Sp out of the induced model
    return _kernel_basis(ctx, rows, ncols)


def new_vector_unramified(model: InducedModel) -> Section:
    """The constant-1 table: the spherical vector of an unramified model."""
    if model.borel.conductor() != 0 or model.steinberg:
        raise ModelError("unramified new vector requested on a ramified (or Steinberg) model")
    tbl = TableSection(model, 1, [model.ctx.one()] * len(p1_table(model.ctx, 1).reps))
    return tbl.as_section()


def new_vector_by_solve(model: InducedModel, n: int, level: int | None = None) -> Section:
    basis = fixed_space(model, n, level)
    if len(basis) == 0:
        raise NewVectorError(f"I({n})-fixed space has dimension 0 (n below the conductor?)")
    if len(basis) > 1:
        raise NewVectorError(f"I({n})-fixed space has dimension {len(basis)} (level too coarse or model error)")
    vec = basis[0]
    lead = next((v for v in vec if not v.is_zero()))
    if not vec[0].is_zero():
        lead = vec[0]  # normalize at the identity cell when possible
    inv = lead.inverse()
    lvl = max(level or 0, n, model.min_level, 1)
    tbl = TableSection(model, lvl, [inv * v for v in vec])
    return tbl.as_section()


def conductor_search(model: InducedModel, cap: int = 6) -> int:
    """Minimal n with a nonzero I(n)-fixed vector (in Sp for the Steinberg model)."""
    for n in range(0, cap + 1):
        if max(n, model.min_level) > 8:
            break
        dim = len(fixed_space(model, n))
        if dim:
            if dim != 1:
                raise NewVectorError(f"fixed space at n = {n} has dimension {dim}, expected 1")
        if dim:
            return n
    raise NewVectorError(f"no fixed vector found up to the cap n = {cap}")
