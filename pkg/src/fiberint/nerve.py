"""Forms on (triangulated or prismatic) nerves and their Čech–de Rham cochains.

A nerve cell is ``(key, ρ)``: ``key`` is either an increasing vertex tuple σ
(plain nerves) or a :class:`PrismaticSimplex` (prismatic nerve), and ``ρ`` is
a simplex of the space complex.  A value on a cell is a :class:`PolyForm` on
``Δ^p × Δ^{dim ρ}`` (plain) or ``Δ^p × Δ^{q_0} × … × Δ^{q_p} × Δ^{dim ρ}``
(prismatic); the last block always carries the space coordinates.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .bundle import PrismaticSimplex
from .complexes import Nerve
from .polyform import PolyForm, identity_coords, images_from_bary, vertex_map_coords


class IncompatibleForm(ValueError):
    pass


# -- cell geometry ----------------------------------------------------------------


def index_dims(key) -> tuple:
    if isinstance(key, PrismaticSimplex):
        return key.dims
    return (len(key) - 1,)


def index_dim(key) -> int:
    """Total dimension of the index cell (``p`` or ``p + Σq``)."""
    return sum(index_dims(key))


def cell_dims(cell) -> tuple:
    key, rho = cell
    return index_dims(key) + (len(rho) - 1,)


def index_faces(key) -> list:
    """Codimension-one faces of an index cell: ``(sign, face, kind, i, j)``.

    Plain: ``kind="t"`` drops vertex ``j``.  Prismatic: ``kind="F"`` drops
    vertex ``j`` of block ``i`` and ``kind="H"`` drops the singleton block ``i``,
    with the signs of the prismatic boundary operators.
    """
    if not isinstance(key, PrismaticSimplex):
        return [((-1) ** j, key[:j] + key[j + 1:], "t", 0, j) for j in range(len(key))] if len(key) > 1 else []
    out = []
    Q = 0
    for i, q in enumerate(key.qs):
        s = -1 if (Q + i) % 2 else 1
        if q > 0:
            for j in range(q + 1):
                blocks = list(key.blocks)
                blocks[i] = blocks[i][:j] + blocks[i][j + 1:]
                out.append((s * (-1) ** j, PrismaticSimplex(key.base, tuple(blocks)), "F", i, j))
        elif key.p > 0:
            face = PrismaticSimplex(key.base[:i] + key.base[i + 1:], key.blocks[:i] + key.blocks[i + 1:])
            out.append((s, face, "H", i, 0))
        Q += q
    return out


def _skip(n: int, j: int) -> list:
    return [i if i < j else i + 1 for i in range(n)]


def face_pullback(form: PolyForm, key, face, kind: str, i: int, j: int) -> PolyForm:
    """Pull a value on ``(key, ρ)`` back to ``(face, ρ)``."""
    src = index_dims(face) + (form.dims[-1],)
    np_ = form.nparams
    fulls = []
    if kind == "t":
        fulls.append(vertex_map_coords(src, 0, _skip(src[0] + 1, j), form.dims[0], np_))
    elif kind == "F":
        fulls.append(identity_coords(src, 0, np_))
        for b in range(len(key.qs)):
            if b == i:
                fulls.append(vertex_map_coords(src, b + 1, _skip(src[b + 1] + 1, j), form.dims[b + 1], np_))
            else:
                fulls.append(identity_coords(src, b + 1, np_))
    elif kind == "H":
        fulls.append(vertex_map_coords(src, 0, _skip(src[0] + 1, i), form.dims[0], np_))
        for b in range(len(key.qs)):
            if b == i:
                fulls.append([PolyForm.constant(src, 1, np_)])
            else:
                fulls.append(identity_coords(src, b + 1 - (b > i), np_))
    else:
        raise ValueError(kind)
    fulls.append(identity_coords(src, len(src) - 1, np_))
    params = [PolyForm.param(src, k, np_) for k in range(np_)]
    return form.pullback(src, images_from_bary(form.dims, fulls, params), np_)


def space_restriction(form: PolyForm, rho: tuple, face: tuple) -> PolyForm:
    """Restrict the space block from ``ρ`` to a face of ``ρ``."""
    if face == rho:
        return form
    pos = {v: k for k, v in enumerate(rho)}
    src = form.dims[:-1] + (len(face) - 1,)
    np_ = form.nparams
    last = len(src) - 1
    fulls = [identity_coords(src, b, np_) for b in range(last)]
    fulls.append(vertex_map_coords(src, last, [pos[v] for v in face], form.dims[-1], np_))
    params = [PolyForm.param(src, k, np_) for k in range(np_)]
    return form.pullback(src, images_from_bary(form.dims, fulls, params), np_)


def facets(rho: tuple) -> list:
    return [rho[:j] + rho[j + 1:] for j in range(len(rho))] if len(rho) > 1 else []


def elementary_form(dims, block: int, I: Sequence[int], nparams: int = 0) -> PolyForm:
    """Whitney form ``ω_I = Σ_j (-1)^j t_{i_j} dt_{i_0} ∧ … ĵ … ∧ dt_{i_p}`` on one block."""
    t = [PolyForm.coord(dims, block, k, nparams) for k in range(dims[block] + 1)]
    dt = [x.d() for x in t]
    out = PolyForm.zero(dims, nparams)
    for j, ij in enumerate(I):
        term = t[ij]
        for k, ik in enumerate(I):
            if k != j:
                term = term.wedge(dt[ik])
        out = out + (term if j % 2 == 0 else -term)
    return out


# -- nerve forms --------------------------------------------------------------------


class NerveForm:
    """A family of PolyForms indexed by the cells of a nerve."""

    def __init__(self, nerve: Nerve, values: Mapping | None = None, approximate: bool = False):
        self.nerve = nerve
        self.values = {c: v for c, v in (values or {}).items() if not v.is_zero()}
        self.approximate = approximate

    @classmethod
    def from_function(cls, nerve: Nerve, fn: Callable, cells: Iterable | None = None) -> "NerveForm":
        vals = {}
        for cell in (nerve.cells() if cells is None else cells):
            vals[cell] = fn(cell)
        return cls(nerve, vals)

    @classmethod
    def from_tops(cls, nerve: Nerve, fn: Callable) -> "NerveForm":
        """Evaluate ``fn`` on the cells ``(key, ρ)`` with ``ρ`` maximal in the star and
        fill in the remaining cells by restriction (checking agreement)."""
        vals: dict = {}
        for k in range(nerve.dim + 1):
            for key in nerve.index.simplices(k):
                star = nerve.star(key)
                for top in star.maximal():
                    v = fn((key, top))
                    _spread(vals, key, top, v)
        return cls(nerve, vals)

    def get(self, cell) -> PolyForm:
        v = self.values.get(cell)
        if v is None:
            return PolyForm.zero(cell_dims(cell))
        return v

    __getitem__ = get

    def cells(self):
        return self.nerve.cells()

    # -- algebra ----------------------------------------------------------
    def _combine(self, other, op):
        if other.nerve is not self.nerve and other.nerve != self.nerve:
            raise IncompatibleForm("forms live on different nerves")
        keys = set(self.values) | set(other.values)
        return NerveForm(self.nerve, {c: op(self.get(c), other.get(c)) for c in keys},
                         self.approximate or other.approximate)

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return NerveForm(self.nerve, {c: -v for c, v in self.values.items()}, self.approximate)

    def scale(self, c):
        return NerveForm(self.nerve, {k: v.scale(c) for k, v in self.values.items()}, self.approximate)

    __rmul__ = scale

    def wedge(self, other: "NerveForm") -> "NerveForm":
        keys = set(self.values) & set(other.values)
        return NerveForm(self.nerve, {c: self.values[c].wedge(other.values[c]) for c in keys},
                         self.approximate or other.approximate)

    def d(self) -> "NerveForm":
        return NerveForm(self.nerve, {c: v.d() for c, v in self.values.items()}, self.approximate)

    def map_values(self, fn) -> "NerveForm":
        return NerveForm(self.nerve, {c: fn(c, v) for c, v in self.values.items()}, self.approximate)

    def is_zero(self) -> bool:
        return not self.values

    def __eq__(self, other):
        if not isinstance(other, NerveForm):
            return NotImplemented
        return self.nerve == other.nerve and self.values == other.values

    __hash__ = None

    def degrees(self) -> set:
        out = set()
        for v in self.values.values():
            out |= v.degrees()
        return out

    def homogeneous(self, k: int) -> "NerveForm":
        return NerveForm(self.nerve, {c: v.homogeneous(k) for c, v in self.values.items()}, self.approximate)

    def __repr__(self):
        return f"NerveForm({self.nerve.name}, {len(self.values)} nonzero cells, degrees={sorted(self.degrees())})"

    # -- normal extension -------------------------------------------------
    def value(self, sigma: Sequence, rho: tuple) -> PolyForm:
        """Value on a possibly permuted or degenerate index tuple (plain nerves).

        The normal extension pulls the canonical value back along the simplicial
        map sending vertex ``i`` of ``Δ^p`` to the position of ``sigma[i]``.
        """
        idx = self.nerve.index
        distinct = list(dict.fromkeys(sigma))
        _, canon = idx.canonical(distinct)
        base = self.get((canon, rho))
        if tuple(sigma) == canon:
            return base
        p = len(sigma) - 1
        src = (p, len(rho) - 1)
        pos = {v: k for k, v in enumerate(canon)}
        fulls = [vertex_map_coords(src, 0, [pos[v] for v in sigma], len(canon) - 1),
                 identity_coords(src, 1)]
        return base.pullback(src, images_from_bary(base.dims, fulls))

    # -- checks -------------------------------------------------------------
    def compatibility_failures(self, limit: int | None = None) -> list:
        """Cells where a face pullback or a space restriction disagrees."""
        bad = []
        for cell in self.nerve.cells():
            key, rho = cell
            v = self.get(cell)
            for _, face, kind, i, j in index_faces(key):
                if face_pullback(v, key, face, kind, i, j) != self.get((face, rho)):
                    bad.append((cell, "index face", face))
            for f in facets(rho):
                if space_restriction(v, rho, f) != self.get((key, f)):
                    bad.append((cell, "space face", f))
            if limit and len(bad) >= limit:
                break
        return bad

    def is_compatible(self) -> bool:
        return not self.compatibility_failures(limit=1)

    def is_normal(self, extra: Mapping | None = None) -> bool:
        """Face compatibility plus agreement of any supplied values on permuted or
        degenerate cells ``{(sigma, ρ): PolyForm}`` with the normal extension."""
        if not self.is_compatible():
            return False
        for (sigma, rho), v in (extra or {}).items():
            if self.value(sigma, rho) != v:
                return False
        return True

    def is_integral(self) -> bool:
        """Values independent of the space coordinates and ``I_Δ`` integer-valued."""
        for cell, v in self.values.items():
            if not v.is_constant_in([len(v.dims) - 1]):
                return False
        for k in sorted(self.degrees()):
            hk = self.homogeneous(k)
            for p in range(self.nerve.dim + 1):
                for _, val in i_delta(hk, p).values.items():
                    if any(x.denominator != 1 for x in val.terms.values()):
                        return False
        return True


def _spread(vals: dict, key, top: tuple, v: PolyForm) -> None:
    stack = [(top, v)]
    while stack:
        rho, form = stack.pop()
        old = vals.get((key, rho))
        if old is not None:
            if old != form:
                raise IncompatibleForm(f"restrictions disagree on cell {(key, rho)!r}")
            continue
        vals[(key, rho)] = form
        for f in facets(rho):
            stack.append((f, space_restriction(form, rho, f)))


# -- cochains -----------------------------------------------------------------------


class CechCochain:
    """Values ``c(key, ρ)`` (PolyForms on ``Δ^{dim ρ}``) on index cells of one type.

    ``degree`` is ``p`` for plain nerves and ``(p, Q)`` for the prismatic nerve.
    """

    def __init__(self, nerve: Nerve, degree, values: Mapping | None = None):
        self.nerve = nerve
        self.degree = degree
        self.values = {c: v for c, v in (values or {}).items() if not v.is_zero()}

    def cells(self) -> list:
        return cochain_cells(self.nerve, self.degree)

    def get(self, cell) -> PolyForm:
        v = self.values.get(cell)
        return v if v is not None else PolyForm.zero((len(cell[1]) - 1,))

    __getitem__ = get

    def __add__(self, other):
        keys = set(self.values) | set(other.values)
        return CechCochain(self.nerve, self.degree, {c: self.get(c) + other.get(c) for c in keys})

    def __neg__(self):
        return CechCochain(self.nerve, self.degree, {c: -v for c, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        return CechCochain(self.nerve, self.degree, {c: v.scale(k) for c, v in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, CechCochain):
            return NotImplemented
        return self.degree == other.degree and self.values == other.values

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.values

    def d(self) -> "CechCochain":
        return CechCochain(self.nerve, self.degree, {c: v.d() for c, v in self.values.items()})

    def is_integral(self) -> bool:
        for v in self.values.values():
            for (e, dd), x in v.terms.items():
                if any(e) or dd or x.denominator != 1:
                    return False
        return True

    def __repr__(self):
        return f"CechCochain({self.nerve.name}, degree={self.degree}, {len(self.values)} nonzero)"


def _key_degree(key):
    if isinstance(key, PrismaticSimplex):
        return (key.p, key.fdim)
    return len(key) - 1


def cochain_cells(nerve: Nerve, degree) -> list:
    if isinstance(degree, tuple):
        p, Q = degree
        keys = [t for t in nerve.index if t.p == p and t.fdim == Q]
    else:
        keys = nerve.index.simplices(degree)
    return [(k, rho) for k in keys for rho in nerve.star(k)]


def cech_delta(c: CechCochain) -> dict:
    """Čech differential; returns ``{degree: cochain}`` (two parts for prismatic cochains)."""
    nerve = c.nerve
    if isinstance(c.degree, tuple):
        p, Q = c.degree
        targets = [(p, Q + 1), (p + 1, Q)]
    else:
        targets = [c.degree + 1]
    out = {}
    for deg in targets:
        vals = {}
        for cell in cochain_cells(nerve, deg):
            key, rho = cell
            acc = PolyForm.zero((len(rho) - 1,))
            for sign, face, _, _, _ in index_faces(key):
                if _key_degree(face) == c.degree:
                    acc = acc + c.get((face, rho)).scale(sign)
            vals[cell] = acc
        out[deg] = CechCochain(nerve, deg, vals)
    return out


def total_differential(c: CechCochain) -> dict:
    """``D̂ = δ + (-1)^p d`` with ``p`` the total index dimension; keyed by degree."""
    parts = cech_delta(c)
    p = sum(c.degree) if isinstance(c.degree, tuple) else c.degree
    dd = c.d().scale(-1 if p % 2 else 1)
    parts[c.degree] = parts.get(c.degree, CechCochain(c.nerve, c.degree)) + dd
    return parts


# -- I_Δ and E ----------------------------------------------------------------------


def i_delta(form: NerveForm, degree) -> CechCochain:
    """Integrate the index factor on every cell of the given index type."""
    vals = {}
    for cell in cochain_cells(form.nerve, degree):
        v = form.values.get(cell)
        if v is None:
            continue
        nidx = len(v.dims) - 1
        vals[cell] = v.integrate_blocks(range(nidx))
    return CechCochain(form.nerve, degree, vals)


def whitney_e(c: CechCochain) -> NerveForm:
    """``E(c)``: Whitney-form extension of a cochain; a right inverse of ``i_delta``."""
    nerve = c.nerve
    if isinstance(c.degree, tuple):
        return _whitney_e_prismatic(c)
    p = c.degree
    fact = factorial(p)
    vals = {}
    for cell in nerve.cells():
        sigma, rho = cell
        if len(sigma) < p + 1:
            continue
        dims = cell_dims(cell)
        acc = PolyForm.zero(dims)
        for I in combinations(range(len(sigma)), p + 1):
            cv = c.values.get((tuple(sigma[i] for i in I), rho))
            if cv is None:
                continue
            acc = acc + elementary_form(dims, 0, I).wedge(cv.embed(dims, [1]))
        vals[cell] = acc.scale(fact)
    return NerveForm(nerve, vals)


def _whitney_e_prismatic(c: CechCochain) -> NerveForm:
    nerve = c.nerve
    p, Q = c.degree
    vals = {}
    for cell in nerve.cells():
        tau, rho = cell
        if tau.p < p or tau.fdim < Q:
            continue
        dims = cell_dims(cell)
        last = len(dims) - 1
        acc = PolyForm.zero(dims)
        for J in combinations(range(tau.p + 1), p + 1):
            choices = []
            for j in J:
                q = tau.qs[j]
                choices.append([S for k in range(q + 1) for S in combinations(range(q + 1), k + 1)])
            for subs in product(*choices):
                qs = [len(S) - 1 for S in subs]
                if sum(qs) != Q:
                    continue
                sub = PrismaticSimplex(tuple(tau.base[j] for j in J),
                                       tuple(tuple(tau.blocks[j][k] for k in S) for j, S in zip(J, subs)))
                cv = c.values.get((sub, rho))
                if cv is None:
                    continue
                term = elementary_form(dims, 0, J)
                weight = factorial(p)
                for j, S in zip(J, subs):
                    term = term.wedge(elementary_form(dims, j + 1, S))
                    weight *= factorial(len(S) - 1)
                acc = acc + term.wedge(cv.embed(dims, [last])).scale(weight)
        vals[cell] = acc
    return NerveForm(nerve, vals)


# -- global-symbol recipes -------------------------------------------------------------


class Recipe:
    """A form written in global symbols, evaluated cell by cell.

    Symbols are ``("T", v)`` for the nerve coordinate of index vertex ``v``
    (zero when ``v`` is not a vertex of the cell), ``("S", w)`` for the fiber
    coordinate of ``w`` in a prismatic cell, and ``("X", w)`` for the
    barycentric coordinate of space vertex ``w``.  Forms built this way are
    automatically face compatible and normal.
    """

    def __init__(self, symbols: Sequence[tuple], poly: PolyForm):
        self.symbols = list(symbols)
        self.index = {s: k for k, s in enumerate(self.symbols)}
        if poly.dims != (1,) * len(self.symbols):
            raise ValueError("recipe polynomial must have one free variable per symbol")
        self.poly = poly

    @classmethod
    def symbol(cls, symbols, s) -> "Recipe":
        symbols = list(symbols)
        n = len(symbols)
        e = [0] * n
        e[symbols.index(s)] = 1
        return cls(symbols, PolyForm((1,) * n, {(tuple(e), ()): Fraction(1)}))

    def images(self, cell) -> list:
        key, rho = cell
        dims = cell_dims(cell)
        last = len(dims) - 1
        zero = PolyForm.zero(dims)
        out = []
        if isinstance(key, PrismaticSimplex):
            tpos = {a: k for k, a in enumerate(key.base)}
            spos = {w: (b, k) for b, blk in enumerate(key.blocks) for k, w in enumerate(blk)}
        else:
            tpos = {a: k for k, a in enumerate(key)}
            spos = {}
        xpos = {w: k for k, w in enumerate(rho)}
        for kind, v in self.symbols:
            if kind == "T" and v in tpos:
                out.append(PolyForm.coord(dims, 0, tpos[v]))
            elif kind == "S" and v in spos:
                b, k = spos[v]
                out.append(PolyForm.coord(dims, b + 1, k))
            elif kind == "X" and v in xpos:
                out.append(PolyForm.coord(dims, last, xpos[v]))
            else:
                out.append(zero)
        return out

    def evaluate(self, cell) -> PolyForm:
        return self.poly.pullback(cell_dims(cell), self.images(cell))

    def on(self, nerve: Nerve) -> NerveForm:
        return NerveForm.from_tops(nerve, self.evaluate)

    def __add__(self, other):
        return Recipe(self.symbols, self.poly + other.poly)

    def __mul__(self, other):
        if isinstance(other, Recipe):
            return Recipe(self.symbols, self.poly.wedge(other.poly))
        return Recipe(self.symbols, self.poly.scale(other))

    __rmul__ = __mul__

    def d(self):
        return Recipe(self.symbols, self.poly.d())


def nerve_symbols(nerve: Nerve, space: bool = True, fiber: bool = False) -> list:
    idx = nerve.index
    if hasattr(idx, "vertices"):
        syms = [("T", v) for v in idx.vertices]
    else:
        syms = [("T", v) for v in idx.B.L.vertices]
    if fiber:
        syms += [("S", w) for w in nerve.space.vertices]
    if space:
        syms += [("X", w) for w in nerve.space.vertices]
    return syms


def random_recipe(symbols: Sequence[tuple], degree: int, rng: random.Random, nterms: int = 4,
                  max_poly: int = 2, coeff_range: int = 3) -> Recipe:
    """Random homogeneous form of the given degree in the symbols."""
    n = len(symbols)
    terms: dict = {}
    for _ in range(nterms):
        e = [0] * n
        for _ in range(rng.randint(0, max_poly)):
            e[rng.randrange(n)] += 1
        dd = tuple(sorted(rng.sample(range(n), degree)))
        c = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, 2))
        if c:
            terms[(tuple(e), dd)] = terms.get((tuple(e), dd), 0) + c
    return Recipe(symbols, PolyForm((1,) * n, terms))


def random_cochain(nerve: Nerve, degree, form_degree: int, rng: random.Random, integer: bool = False,
                   max_poly: int = 2, density: float = 0.6) -> CechCochain:
    """Random cochain; values are cell-dependent space recipes (constants when ``integer``)."""
    syms = [("X", w) for w in nerve.space.vertices]
    vals = {}
    keys = sorted({k for (k, _) in cochain_cells(nerve, degree)}, key=repr)
    for key in keys:
        if rng.random() > density:
            continue
        if integer:
            if form_degree:
                raise ValueError("integer cochains are functions")
            c = rng.randint(-3, 3)
            for rho in nerve.star(key):
                vals[(key, rho)] = PolyForm.constant((len(rho) - 1,), c)
            continue
        rec = random_recipe(syms, form_degree, rng, nterms=3, max_poly=max_poly)
        for rho in nerve.star(key):
            cell = (key, rho)
            # evaluate on the space block only
            dims = (len(rho) - 1,)
            pos = {w: k for k, w in enumerate(rho)}
            ims = [PolyForm.coord(dims, 0, pos[w]) if w in pos else PolyForm.zero(dims) for (_, w) in syms]
            vals[cell] = rec.poly.pullback(dims, ims)
    return CechCochain(nerve, degree, vals)


def random_form(nerve: Nerve, degree: int, rng: random.Random, max_poly: int = 2,
                with_whitney: bool = True) -> NerveForm:
    """Random compatible normal form: a global recipe plus Whitney terms of random cochains."""
    syms = nerve_symbols(nerve)
    form = random_recipe(syms, degree, rng, max_poly=max_poly).on(nerve)
    if with_whitney:
        for p in range(0, min(degree, nerve.dim) + 1):
            c = random_cochain(nerve, p, degree - p, rng, max_poly=max(0, max_poly - 1), density=0.5)
            form = form + whitney_e(c)
    return form
