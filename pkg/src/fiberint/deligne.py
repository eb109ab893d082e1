"""Deligne-cohomology representatives on nerves and the operations on them.

A representative of level ``l`` is a triple ``(Λ, α, β)``: ``Λ`` a degree-``l``
nerve form, ``α`` a global PL form of degree ``l+1`` (the curvature) and
``β`` an integral nerve form of degree ``l+1`` with ``dΛ = ε^*α − β``.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

import numpy as np
from scipy import integrate

from .bundle import BundleTriangulation
from .complexes import Chain, Nerve, SimplicialComplex
from .integration import (InconsistentRestriction, fiber_integrate_nw, fiber_integrate_space, integrate_KL,
                          integrate_pou, pou_chart, pullback_base, pullback_nw)
from .nerve import (CechCochain, NerveForm, cell_dims, cochain_cells, i_delta, total_differential,
                    whitney_e)
from .plforms import SpaceForm, whitney_space
from .polyform import PolyForm, ell_sign, identity_coords
from .products import (BumpQuadrature, ProductForm, ProductNerveForm, as_product, default_quadrature,
                       fiber_integrate_product, wedge1)

log = logging.getLogger(__name__)


class RelationViolated(ValueError):
    def __init__(self, message: str, cell=None):
        super().__init__(message)
        self.cell = cell


class BoundaryNonEmpty(ValueError):
    pass


class LevelMismatch(ValueError):
    pass


class ClassMismatch(AssertionError):
    pass


@dataclass
class DeligneRep:
    level: int
    Lam: NerveForm
    alpha: SpaceForm
    beta: NerveForm

    @property
    def nerve(self) -> Nerve:
        return self.Lam.nerve

    @property
    def approximate(self) -> bool:
        return isinstance(self.Lam, ProductNerveForm) or isinstance(self.beta, ProductNerveForm)

    def twist(self, theta: SpaceForm) -> "DeligneRep":
        """Add a closed global form to ``Λ``; flat, with holonomy given by the periods of ``θ``."""
        return DeligneRep(self.level, self.Lam + theta.epsilon(self.nerve), self.alpha, self.beta)

    def __repr__(self):
        return f"DeligneRep(level={self.level}, nerve={self.nerve.name}, approximate={self.approximate})"


def trivial_rep(nerve: Nerve, level: int) -> DeligneRep:
    return DeligneRep(level, NerveForm(nerve), SpaceForm(nerve.space), NerveForm(nerve))


@dataclass
class Report:
    ok: bool
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def lines(self) -> list:
        out = [f"{k}: {v}" for k, v in self.checks.items()]
        out += [f"FAIL {f}" for f in self.failures]
        out.append("result: " + ("ok" if self.ok else "failed"))
        return out


# -- validation -----------------------------------------------------------------------


def _sample_points(dims, rng: random.Random, count: int) -> list:
    pts = []
    for _ in range(count):
        pt = []
        for q in dims:
            xs = [rng.random() + 1e-3 for _ in range(q + 1)]
            s = sum(xs)
            pt += [x / s for x in xs[1:]]
        pts.append(pt)
    return pts


def _max_gap(f, g, cells, rng, samples=3) -> tuple:
    """Largest coefficient gap between two (possibly approximate) forms at random points."""
    worst, where = 0.0, None
    for cell in cells:
        for pt in _sample_points(cell_dims(cell), rng, samples):
            a, b = f(cell).evaluate(pt), g(cell).evaluate(pt)
            for k in set(a) | set(b):
                gap = abs(a.get(k, 0.0) - b.get(k, 0.0))
                if gap > worst:
                    worst, where = gap, cell
    return worst, where


def validate_rep(r: DeligneRep, tol: float = 1e-8, strict: bool = True, seed: int = 0) -> Report:
    """Check ``dΛ = ε^*α − β`` and integrality of ``β``.

    Exact representatives are compared exactly; approximate ones at random
    points of every cell, within ``tol``.
    """
    rep = Report(True)
    nerve = r.nerve
    ea = r.alpha.epsilon(nerve)
    if not r.approximate:
        lhs, rhs = r.Lam.d(), ea - r.beta
        bad = [c for c in set(lhs.values) | set(rhs.values) if lhs.get(c) != rhs.get(c)]
        rep.checks["relation dΛ = ε*α − β"] = "exact" if not bad else f"{len(bad)} cells differ"
        if bad:
            rep.ok = False
            rep.failures.append(f"relation fails on {sorted(bad, key=repr)[0]!r}")
        integral = r.beta.is_integral()
    else:
        lam = r.Lam if isinstance(r.Lam, ProductNerveForm) else as_product(r.Lam)
        beta = r.beta if isinstance(r.beta, ProductNerveForm) else as_product(r.beta)
        lhs = lam.d()
        rhs = as_product(ea, lam.quad) - beta
        gap, where = _max_gap(lhs.get, rhs.get, nerve.cells(), random.Random(seed))
        rep.checks["relation dΛ = ε*α − β"] = f"max gap {gap:.3e} (tol {tol:.1e})"
        if gap > tol:
            rep.ok = False
            rep.failures.append(f"relation fails on {where!r} by {gap:.3e}")
        integral = True
    if not r.alpha.is_compatible():
        rep.ok = False
        rep.failures.append("curvature is not face compatible")
    rep.checks["β integral"] = integral
    if not integral:
        rep.ok = False
        rep.failures.append("β is not integral")
    if strict and not rep.ok:
        raise RelationViolated("; ".join(rep.failures))
    return rep


@dataclass
class CechConnection:
    """``θ`` and ``ω_0 … ω_l`` with ``ω_i`` of bidegree ``(i, l − i)``."""

    theta: CechCochain
    omegas: list

    def relation_failures(self, alpha: SpaceForm) -> list:
        """Cells where ``D̂ω = α|_0 − θ`` fails, bidegree by bidegree."""
        l = len(self.omegas) - 1
        nerve = self.theta.nerve
        total: dict = {}
        for w in self.omegas:
            for deg, part in total_differential(w).items():
                total[deg] = total[deg] + part if deg in total else part
        bad = []
        for p in range(l + 2):
            got = total.get(p, CechCochain(nerve, p))
            want = CechCochain(nerve, p)
            if p == 0:
                want = CechCochain(nerve, 0, {cell: alpha.get(cell[1]) for cell in cochain_cells(nerve, 0)})
            if p == l + 1:
                want = want - self.theta
            for cell in set(got.values) | set(want.values):
                if got.get(cell) != want.get(cell):
                    bad.append((p, cell))
        return bad


def to_cech(r: DeligneRep) -> CechConnection:
    """Čech view of a representative; the relations are verified exactly."""
    if r.approximate:
        raise ValueError("the Čech view is exact only")
    l = r.level
    omegas = [i_delta(r.Lam.homogeneous(l), i) for i in range(l + 1)]
    theta = i_delta(r.beta.homogeneous(l + 1), l + 1)
    cc = CechConnection(theta, omegas)
    bad = cc.relation_failures(r.alpha)
    if bad:
        raise RelationViolated(f"Čech relation fails in bidegree {bad[0][0]} on {bad[0][1]!r}", bad[0][1])
    if not theta.is_integral():
        raise RelationViolated("θ is not integer valued")
    return cc


def curvature(r: DeligneRep) -> SpaceForm:
    return r.alpha


def is_flat(r: DeligneRep) -> bool:
    return r.alpha.is_zero()


# -- constructing representatives -----------------------------------------------------


def _whitney_poly(dims, coords: Sequence[PolyForm], cochain: Mapping, k: int) -> PolyForm:
    """``k! Σ_I c_I ω_I`` in the given 0-forms (one per vertex)."""
    acc = PolyForm.zero(dims)
    dz = [z.d() for z in coords]
    for I, c in cochain.items():
        term = PolyForm.zero(dims)
        for j, ij in enumerate(I):
            w = coords[ij]
            for l, il in enumerate(I):
                if l != j:
                    w = w.wedge(dz[il])
            term = term + (w if j % 2 == 0 else -w)
        acc = acc + term.scale(c)
    return acc.scale(factorial(k))


def transgression_rep(K: SimplicialComplex, cocycle: Mapping, nerve: Nerve | None = None) -> DeligneRep:
    """Representative with curvature the Whitney form of an integer simplicial cocycle.

    ``β = E(c)`` in nerve coordinates, ``α`` the Whitney form in space
    coordinates, and ``Λ = −∫_λ W_c(λT + (1−λ)X)`` the straight-line homotopy
    between them, so that ``dΛ = ε^*α − β``.
    """
    items = {K.canonical(s)[1]: K.canonical(s)[0] * int(v) for s, v in cocycle.items() if v}
    if not items:
        raise ValueError("empty cocycle")
    k = len(next(iter(items))) - 1
    nerve = nerve or _nerve_of(K)
    level = k - 1
    cech = CechCochain(nerve, k, {(s, rho): PolyForm.constant((len(rho) - 1,), items[s])
                                  for (s, rho) in cochain_cells(nerve, k) if s in items})
    beta = whitney_e(cech)
    alpha = whitney_space(K, items)

    def lam(cell):
        sigma, rho = cell
        verts = list(dict.fromkeys(sigma + rho))
        local = {v: i for i, v in enumerate(verts)}
        sub = {tuple(local[v] for v in I): c for I, c in items.items() if set(I) <= set(verts)}
        if not sub:
            return PolyForm.zero(cell_dims(cell))
        dims = cell_dims(cell) + (1,)
        lam_ = PolyForm.coord(dims, 2, 1)
        zero = PolyForm.zero(dims)
        tpos = {v: i for i, v in enumerate(sigma)}
        xpos = {v: i for i, v in enumerate(rho)}
        coords = []
        for v in verts:
            T = PolyForm.coord(dims, 0, tpos[v]) if v in tpos else zero
            X = PolyForm.coord(dims, 1, xpos[v]) if v in xpos else zero
            coords.append(lam_ * T + (1 - lam_) * X)
        W = _whitney_poly(dims, coords, sub, k)
        return W.integrate_blocks([2], sign=-1)

    Lam = NerveForm.from_tops(nerve, lam)
    return DeligneRep(level, Lam, alpha, beta)


def _nerve_of(K: SimplicialComplex) -> Nerve:
    from .complexes import triangulated_nerve

    return triangulated_nerve(K)


def fundamental_cocycle(B: BundleTriangulation, base_cycle: Mapping, k: int = 1) -> dict:
    """An integer top cocycle of K taking the value ``k`` on the fundamental class over ``base_cycle``.

    It is supported on a single top simplex.
    """
    eta, z = sorted(base_cycle.items(), key=repr)[0]
    tau, o = sorted(B.fundamental_class(tuple(eta)).items(), key=repr)[0]
    return {tau.simplex: k * o * z}


def circle_cycle(L: SimplicialComplex) -> Chain:
    """The fundamental 1-cycle of a triangulated circle, following vertex order around."""
    verts = list(L.vertices)
    adj = {v: [] for v in verts}
    for a, b in L.simplices(1):
        adj[a].append(b)
        adj[b].append(a)
    start = verts[0]
    cyc = Chain()
    prev, cur = None, start
    while True:
        nxt = [w for w in adj[cur] if w != prev][0] if prev is not None else min(adj[cur], key=L.pos.get)
        sign, e = L.canonical((cur, nxt))
        cyc.add(e, sign)
        prev, cur = cur, nxt
        if cur == start:
            break
    return cyc


# -- pushforward --------------------------------------------------------------------


def pushforward(r: DeligneRep, B: BundleTriangulation, method: str = "combinatorial") -> DeligneRep:
    """``π_!``: integrate a representative on the nerve of K along the fibers.

    ``Λ`` carries the sign ``(−1)^n`` from Stokes' formula so that the
    relation ``dΛ = ε^*α − β`` survives.
    """
    if B.has_boundary():
        raise BoundaryNonEmpty("fibers have boundary; π_! needs closed fibers")
    integ = {"combinatorial": integrate_KL, "pou": integrate_pou}[method]
    Lam = integ(r.Lam, B)
    if B.n % 2:
        Lam = -Lam
    beta = integ(r.beta, B)
    alpha = fiber_integrate_space(r.alpha, B)
    return DeligneRep(r.level - B.n, Lam, alpha, beta)


# -- products ------------------------------------------------------------------------


def deligne_product(r1: DeligneRep, r2: DeligneRep, quad: BumpQuadrature | None = None) -> DeligneRep:
    """``Λ₁ ∧₁ ε^*α₂ + (−1)^{l₁+1} β₁ ∧₁ Λ₂`` with curvature ``α₁ ∧ α₂`` and ``β₁ ∧₁ β₂``."""
    quad = quad or default_quadrature()
    nerve = r1.nerve
    ea2 = r2.alpha.epsilon(nerve)
    Lam = wedge1(r1.Lam, ea2, quad) + wedge1(r1.beta, r2.Lam, quad).scale((-1) ** (r1.level + 1))
    beta = wedge1(r1.beta, r2.beta, quad)
    return DeligneRep(r1.level + r2.level + 1, Lam, r1.alpha.wedge(r2.alpha), beta)


# -- class equality -----------------------------------------------------------------


def _diagonal_value(value, rho: tuple):
    """Pull a cell value on ``(ρ, ρ)`` back along ``t = x``."""
    q = len(rho) - 1
    src = (q,)
    if isinstance(value, ProductForm):
        images = identity_coords(src, 0)[1:] * 2
        return value.pullback(src, images)
    return value.pullback(src, identity_coords(src, 0)[1:] * 2)


def holonomy(r: DeligneRep, cycle: Mapping, samples: int = 0):
    """``∫_z diag^*Λ`` over an ``l``-cycle of the base (exact, or a float when approximate)."""
    lam = r.Lam
    total = Fraction(0) if not r.approximate else 0.0
    for rho, c in cycle.items():
        rho = tuple(rho)
        v = lam.get((rho, rho))
        if v.is_zero():
            continue
        pulled = _diagonal_value(v, rho)
        if isinstance(pulled, ProductForm):
            total += c * _integrate_product_top(pulled)
        else:
            total += c * pulled.homogeneous(len(rho) - 1).integrate_top()
    return total


def _integrate_product_top(pf: ProductForm) -> float:
    q = pf.dims[0]
    top = tuple(range(q))
    if q == 0:
        return pf.evaluate([]).get((), 0.0)
    if q != 1:
        raise NotImplementedError("numeric holonomy is implemented along 0- and 1-cycles")
    val, _ = integrate.quad(lambda s: pf.evaluate([s]).get(top, 0.0), 0.0, 1.0, epsabs=1e-12, limit=200)
    return val


def _frac_distance(x) -> float:
    """Distance from ``x`` to the nearest integer."""
    return float(abs(x - round(x)))


def class_equal(r1: DeligneRep, r2: DeligneRep, cycles: Sequence[Mapping], tol: float = 1e-8) -> bool:
    """Equal curvature and equal holonomy mod ℤ over every basis cycle."""
    return class_report(r1, r2, cycles, tol).ok


def class_report(r1: DeligneRep, r2: DeligneRep, cycles: Sequence[Mapping], tol: float = 1e-8) -> Report:
    if r1.level != r2.level:
        raise LevelMismatch(f"levels {r1.level} and {r2.level}")
    rep = Report(True)
    diff = r1.alpha - r2.alpha
    same = diff.is_zero()
    rep.checks["curvature"] = "equal" if same else "different"
    rep.ok &= same
    exact = not (r1.approximate or r2.approximate)
    for k, z in enumerate(cycles):
        h1, h2 = holonomy(r1, z), holonomy(r2, z)
        gap = h1 - h2
        if exact:
            good = Fraction(gap).denominator == 1
            rep.checks[f"holonomy {k}"] = f"{h1} vs {h2}"
        else:
            good = _frac_distance(gap) <= tol
            rep.checks[f"holonomy {k}"] = f"{float(h1):.12g} vs {float(h2):.12g}"
        rep.ok &= good
        if not good:
            rep.failures.append(f"holonomy differs mod Z over cycle {k}")
    if not same:
        rep.failures.append("curvatures differ")
    return rep


# -- projection formula ----------------------------------------------------------------


def _quad_simplices(fn, dims: Sequence[int], size: int):
    """Integrate a vector-valued ``fn(point)`` over a product of simplices (reduced coordinates)."""
    flat = [(b, j) for b, q in enumerate(dims) for j in range(q)]

    def rec(k, fixed):
        if k == len(flat):
            return np.asarray(fn(fixed), dtype=float)
        b, j = flat[k]
        used = sum(fixed[i] for i in range(len(fixed)) if flat[i][0] == b)

        def inner(x):
            return rec(k + 1, fixed + [x])

        val, _ = integrate.quad_vec(inner, 0.0, 1.0 - used, epsabs=1e-12, epsrel=1e-12)
        return val

    if not flat:
        return np.asarray(fn([]), dtype=float)
    return rec(0, [])


def pou_integral_at(form: ProductNerveForm, B: BundleTriangulation, sigma: tuple, eta: tuple,
                    point: Sequence[float]) -> dict:
    """Numeric partition-of-unity integral of a product form at a point of ``Δ^p × η`` (η maximal)."""
    out: dict = {}
    nbase = len(point)
    for tau, coef in B.fundamental_class(eta).items():
        src, cell, images = pou_chart(tau, sigma)
        v = form.values.get(cell)
        if v is None:
            continue
        pf = v.pullback(src, images)
        fiber_dims = src[2:]
        nf = sum(fiber_dims)
        fvars = list(range(nbase, nbase + nf))
        sign = coef * ell_sign([q + 1 for q in tau.qs])
        keys = sorted({tuple(x for x in d if x not in fvars) for t in pf.terms for (_, d) in t.poly.terms
                       if set(fvars) <= set(d)})
        if not keys:
            continue
        index = {k: i for i, k in enumerate(keys)}

        def fn(w):
            vec = np.zeros(len(keys))
            full = list(point) + list(w)
            for d, val in pf.evaluate(full).items():
                if not set(fvars) <= set(d):
                    continue
                rest = tuple(x for x in d if x not in fvars)
                order = fvars + list(rest)
                inv = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
                vec[index[rest]] += (-1 if inv % 2 else 1) * val
            return vec

        res = _quad_simplices(fn, fiber_dims, len(keys))
        for k, val in zip(keys, res):
            out[k] = out.get(k, 0.0) + sign * float(val)
    return {k: v for k, v in out.items() if v != 0.0}


def projection_formula_check(omega1: NerveForm, omega2: NerveForm, B: BundleTriangulation,
                             quad: BumpQuadrature | None = None, samples: int = 2, seed: int = 0,
                             tol: float = 1e-8) -> Report:
    """Compare ``(∫ω₁) ∧₁ ω₂`` with ``∫(ω₁ ∧₁ π^*ω₂)`` at random points of every top cell.

    ``ω₁`` lives on the pulled-back cover nerve ``B.NW`` or on the star cover
    nerve ``B.NK``.  On ``NW`` the product only splits the base index and
    commutes with fiber integration.  On ``NK`` the chart pullback does not
    commute with ``∧₁`` and the two sides differ at the chain level.
    """
    quad = quad or default_quadrature()
    rng = random.Random(seed)
    if omega1.nerve == B.NW:
        lhs = wedge1(fiber_integrate_nw(omega1, B), omega2, quad)
        inner = wedge1(omega1, pullback_nw(omega2, B), quad)

        def rhs(sigma, eta, pt):
            return fiber_integrate_product(inner, B, sigma, eta).evaluate(pt)
        cover = "pulled-back cover"
    elif omega1.nerve == B.NK:
        lhs = wedge1(integrate_pou(omega1, B), omega2, quad)
        inner = wedge1(omega1, pullback_base(omega2, B), quad)

        def rhs(sigma, eta, pt):
            return pou_integral_at(inner, B, sigma, eta, pt)
        cover = "star cover of K"
    else:
        raise ValueError("ω₁ must live on the pulled-back cover nerve or the nerve of K")
    worst, where, count = 0.0, None, 0
    for sigma in B.L:
        for eta in B.L.closed_star(sigma).maximal():
            cell = (sigma, eta)
            for pt in _sample_points(cell_dims(cell), rng, samples):
                a = lhs.evaluate(cell, pt)
                b = rhs(sigma, eta, pt)
                count += 1
                for k in set(a) | set(b):
                    gap = abs(a.get(k, 0.0) - b.get(k, 0.0))
                    if gap > worst:
                        worst, where = gap, cell
    rep = Report(worst <= tol)
    rep.checks["cover"] = cover
    rep.checks["points"] = count
    rep.checks["max discrepancy"] = f"{worst:.3e}"
    rep.checks["worst cell"] = repr(where)
    if not rep.ok:
        rep.failures.append(f"discrepancy {worst:.3e} exceeds {tol:g}")
    return rep
