"""Integration along the fibers of a triangulated bundle."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping

from .bundle import BundleTriangulation, PrismaticSimplex, all_prismatic, boundary_F, boundary_H
from .complexes import Chain, Nerve
from .nerve import IncompatibleForm, NerveForm, cell_dims, facets, space_restriction
from .polyform import (PolyForm, ell_coords, ell_sign, groupsum_pushforward, identity_coords,
                       images_from_bary, vertex_map_coords)


class InconsistentRestriction(ValueError):
    pass


class DegreeTooLow(UserWarning):
    pass


class NonPolynomialInput(ValueError):
    pass


@dataclass(frozen=True)
class AWTerm:
    front: PrismaticSimplex
    back: PrismaticSimplex
    cut: tuple
    sign: int = 1


def aw_sign(tau: PrismaticSimplex, where: list, cut: tuple) -> int:
    """Sign of one cut, chosen so that AW commutes with ``∂_F``.

    Each front block ``j`` is moved past the vertices that precede it in
    ``tau`` but not in the front, and the base simplex past the back's fiber.
    """
    e = 0
    front_before = 0
    for j, (i, s) in enumerate(zip(where, cut)):
        tau_before = sum(q + 1 for q in tau.qs[:i])
        e += s * (tau_before - front_before)
        front_before += s + 1
    p = len(where) - 1
    e += p * (tau.fdim - sum(cut))
    return -1 if e % 2 else 1


def aw_decompose(tau: PrismaticSimplex, sigma) -> list:
    """Front/back splittings of ``tau`` cut inside each block over ``sigma``."""
    sigma = tuple(sigma)
    where = [tau.base.index(a) for a in sigma]
    out = []
    for cut in product(*(range(tau.qs[i] + 1) for i in where)):
        front = PrismaticSimplex(sigma, tuple(tau.blocks[i][: s + 1] for i, s in zip(where, cut)))
        blocks = list(tau.blocks)
        for i, s in zip(where, cut):
            blocks[i] = blocks[i][s:]
        out.append(AWTerm(front, PrismaticSimplex(tau.base, tuple(blocks)), cut, aw_sign(tau, where, cut)))
    return out


def aw_chain(c: Chain, sigma) -> Chain:
    """AW on a chain; the result is keyed by ``(front, back)`` pairs."""
    out = Chain()
    for tau, coef in c.items():
        for t in aw_decompose(tau, sigma):
            out.add((t.front, t.back), coef * t.sign)
    return out


def tensor_boundary_F(c: Chain) -> Chain:
    """``∂_F(a ⊗ b) = ∂_F a ⊗ b + (-1)^{dim a} a ⊗ ∂_F b`` with ``dim a`` the simplex dimension."""
    out = Chain()
    for (a, b), coef in c.items():
        for fa, x in boundary_F(Chain({a: 1})).items():
            out.add((fa, b), coef * x)
        sign = -1 if (a.p + a.fdim) % 2 else 1
        for fb, x in boundary_F(Chain({b: 1})).items():
            out.add((a, fb), coef * x * sign)
    return out


# -- the combinatorial integral ----------------------------------------------------


def _push_term(form: PolyForm, term: AWTerm) -> PolyForm:
    v = groupsum_pushforward(form, 0, [s + 1 for s in term.cut])
    return groupsum_pushforward(v, 1, [q + 1 for q in term.back.qs])


def integrate_combinatorial(omega: NerveForm, B: BundleTriangulation, sigma, eta, chain: Chain | None = None) -> PolyForm:
    """Fiber integral of ``omega`` (a form on the nerve of K) on the cell ``(σ, η)``.

    ``η`` must be a maximal simplex of L containing ``σ``; ``chain`` defaults to
    the fundamental class over ``η``.
    """
    sigma, eta = tuple(sigma), tuple(eta)
    if chain is None:
        chain = B.fundamental_class(eta)
    dims = (len(sigma) - 1, len(eta) - 1)
    out = PolyForm.zero(dims)
    for tau, coef in chain.items():
        for term in aw_decompose(tau, sigma):
            v = omega.values.get((term.front.simplex, term.back.simplex))
            if v is None:
                continue
            out = out + _push_term(v, term).scale(coef * term.sign)
    return out


def _assemble(B: BundleTriangulation, top_values: Mapping) -> NerveForm:
    """Fill every NL cell from the values on ``(σ, maximal η)`` and check agreement."""
    vals: dict = {}
    origin: dict = {}
    for (sigma, eta), v in top_values.items():
        stack = [(eta, v)]
        while stack:
            rho, form = stack.pop()
            cell = (sigma, rho)
            if cell in vals:
                if vals[cell] != form:
                    raise InconsistentRestriction(
                        f"cell {cell!r}: restriction from {eta!r} disagrees with {origin[cell]!r}")
                continue
            vals[cell] = form
            origin[cell] = eta
            for f in facets(rho):
                stack.append((f, space_restriction(form, rho, f)))
    return NerveForm(B.NL, vals)


def integrate_KL(omega: NerveForm, B: BundleTriangulation, boundary: bool = False) -> NerveForm:
    """``∫_{K/L} ω`` as a form on the triangulated nerve of L.

    With ``boundary=True`` the fiberwise boundary ``∂_F[Y_η]`` replaces the
    fundamental class, giving the boundary term of Stokes' formula.
    """
    tops = {}
    for sigma in B.L:
        for eta in B.L.closed_star(sigma).maximal():
            chain = B.fundamental_class(eta)
            if boundary:
                chain = boundary_F(chain)
            tops[(sigma, eta)] = integrate_combinatorial(omega, B, sigma, eta, chain)
    return _assemble(B, tops)


def consistency_check(omega: NerveForm, B: BundleTriangulation) -> bool:
    try:
        integrate_KL(omega, B)
    except InconsistentRestriction:
        return False
    return True


def restrict_integral(value: PolyForm, eta: tuple, face: tuple) -> PolyForm:
    return space_restriction(value, tuple(eta), tuple(face))


def stokes_residual(omega: NerveForm, B: BundleTriangulation) -> NerveForm:
    """``∫dω − ∫_{∂_F}ω − (−1)^n d∫ω``; identically zero when Stokes holds."""
    lhs = integrate_KL(omega.d(), B)
    bd = integrate_KL(omega, B, boundary=True)
    inner = integrate_KL(omega, B).d()
    if B.n % 2:
        inner = -inner
    return lhs - bd - inner


# -- maps between the nerves ----------------------------------------------------------


def _vertex_pullback(form: PolyForm, src_dims: tuple, maps: list) -> PolyForm:
    """Pull back along blockwise simplicial maps; ``maps[b]`` lists target positions."""
    fulls = [vertex_map_coords(src_dims, b, m, form.dims[b]) for b, m in enumerate(maps)]
    return form.pullback(src_dims, images_from_bary(form.dims, fulls))


def pullback_base(omega: NerveForm, B: BundleTriangulation) -> NerveForm:
    """``π^*``: forms on the nerve of L to forms on the nerve of K."""
    vals = {}
    for cell in B.NK.cells():
        rho0, rho = cell
        sigma, eta = B.image(rho0), B.image(rho)
        v = omega.values.get((sigma, eta))
        if v is None:
            continue
        ps, pe = {a: k for k, a in enumerate(sigma)}, {a: k for k, a in enumerate(eta)}
        vals[cell] = _vertex_pullback(v, cell_dims(cell), [[ps[B.vmap[x]] for x in rho0],
                                                           [pe[B.vmap[x]] for x in rho]])
    return NerveForm(B.NK, vals)


def pullback_nw(omega: NerveForm, B: BundleTriangulation) -> NerveForm:
    """``π^*``: forms on the nerve of L to forms on the pulled-back cover nerve."""
    vals = {}
    for cell in B.NW.cells():
        sigma, rho = cell
        eta = B.image(rho)
        v = omega.values.get((sigma, eta))
        if v is None:
            continue
        pe = {a: k for k, a in enumerate(eta)}
        vals[cell] = _vertex_pullback(v, cell_dims(cell), [list(range(len(sigma))),
                                                           [pe[B.vmap[x]] for x in rho]])
    return NerveForm(B.NW, vals)


def epsilon_prime(nu: NerveForm, B: BundleTriangulation) -> NerveForm:
    """``ε′^*``: forms on the pulled-back cover nerve to the nerve of K.

    The index factor is collapsed by summing the coordinates over each L-vertex.
    """
    vals = {}
    for cell in B.NK.cells():
        rho0, rho = cell
        sigma = B.image(rho0)
        v = nu.values.get((sigma, rho))
        if v is None:
            continue
        ps = {a: k for k, a in enumerate(sigma)}
        vals[cell] = _vertex_pullback(v, cell_dims(cell), [[ps[B.vmap[x]] for x in rho0],
                                                           list(range(len(rho)))])
    return NerveForm(B.NK, vals)


def fiber_integrate_nw(nu: NerveForm, B: BundleTriangulation) -> NerveForm:
    """Plain integration along the fibers of a form on the pulled-back cover nerve."""
    tops = {}
    for sigma in B.L:
        for eta in B.L.closed_star(sigma).maximal():
            acc = PolyForm.zero((len(sigma) - 1, len(eta) - 1))
            for tau, coef in B.fundamental_class(eta).items():
                v = nu.values.get((sigma, tau.simplex))
                if v is not None:
                    # fiber-first, so undo the index-block crossing sign
                    sign = -coef if (len(sigma) - 1) * tau.fdim % 2 else coef
                    acc = acc + groupsum_pushforward(v, 1, [q + 1 for q in tau.qs]).scale(sign)
            tops[(sigma, eta)] = acc
    return _assemble(B, tops)


# -- the partition-of-unity integral ---------------------------------------------------


def pou_chart(tau: PrismaticSimplex, sigma: tuple):
    """Parametrisation of ``Δ^p × τ`` used by the partition-of-unity integral.

    Returns ``(source dims, nerve cell, images)``: source blocks are
    ``(t, y, w^0, …, w^m)`` and ``τ`` is parametrised by ``x = ℓ(y, w)``.
    There the barycentric partition of unity over the L-vertex ``a_i`` is the
    fiber coordinate ``w^i``, so the nerve point ``φ̃`` has coordinates
    ``t_j w^{i_j}`` and the chart is polynomial.
    """
    p, m = len(sigma) - 1, tau.p
    where = [tau.base.index(a) for a in sigma]
    tilde = tuple(v for i in where for v in tau.blocks[i])
    src = (p, m, *tau.qs)
    t = identity_coords(src, 0)
    nerve_full = []
    for j, i in enumerate(where):
        nerve_full.extend(t[j] * w for w in identity_coords(src, 2 + i))
    space_full = ell_coords(src, 1, list(range(2, 2 + m + 1)))
    target = (len(tilde) - 1, len(tau.simplex) - 1)
    return src, (tilde, tau.simplex), images_from_bary(target, [nerve_full, space_full])


def _pou_cell(omega: NerveForm, tau: PrismaticSimplex, sigma: tuple, coef) -> PolyForm | None:
    """Contribution of one prismatic cell ``Δ^p × τ`` to the value on ``(σ, base τ)``."""
    src, cell, images = pou_chart(tau, sigma)
    v = omega.values.get(cell)
    if v is None:
        return None
    pulled = v.pullback(src, images)
    fibers = list(range(2, len(src)))
    return pulled.integrate_blocks(fibers, sign=coef * ell_sign([q + 1 for q in tau.qs]))


def integrate_pou(omega: NerveForm, B: BundleTriangulation, boundary: bool = False) -> NerveForm:
    """Integration along the fibers through barycentric partitions of unity.

    ``omega`` lives on the nerve of the star cover of K; the result lives on the
    nerve of the star cover of L.  With ``boundary=True`` the fiberwise boundary
    chain is used instead of the fundamental class.
    """
    if omega.approximate:
        raise NonPolynomialInput("the partition-of-unity integral needs exact polynomial input")
    tops = {}
    for sigma in B.L:
        for eta in B.L.closed_star(sigma).maximal():
            chain = B.fundamental_class(eta)
            if boundary:
                chain = boundary_F(chain)
            acc = PolyForm.zero((len(sigma) - 1, len(eta) - 1))
            for tau, coef in chain.items():
                part = _pou_cell(omega, tau, sigma, coef)
                if part is not None:
                    acc = acc + part
            tops[(sigma, eta)] = acc
    return _assemble(B, tops)


def pou_stokes_residual(omega: NerveForm, B: BundleTriangulation) -> NerveForm:
    lhs = integrate_pou(omega.d(), B)
    bd = integrate_pou(omega, B, boundary=True)
    inner = integrate_pou(omega, B).d()
    if B.n % 2:
        inner = -inner
    return lhs - bd - inner


def fiber_integrate_space(alpha, B: BundleTriangulation):
    """Integration along the fibers of a global PL form on K; a global form on L."""
    from .plforms import SpaceForm

    def top(eta):
        acc = PolyForm.zero((len(eta) - 1,))
        for tau, coef in B.fundamental_class(eta).items():
            v = alpha.values.get(tau.simplex)
            if v is not None:
                acc = acc + groupsum_pushforward(v, 0, [q + 1 for q in tau.qs]).scale(coef)
        return acc

    try:
        return SpaceForm.from_tops(B.L, top)
    except IncompatibleForm as exc:
        raise InconsistentRestriction(str(exc)) from None


def prism_checks(B: BundleTriangulation) -> dict:
    """Exhaustive chain identities on every prismatic generator; each entry counts failures."""
    fails = {"dF^2": 0, "dH^2": 0, "dF dH + dH dF": 0, "AW dF = dF AW": 0}
    gens = all_prismatic(B)
    for tau in gens:
        c = Chain({tau: 1})
        f, h = boundary_F(c), boundary_H(c)
        fails["dF^2"] += bool(boundary_F(f))
        fails["dH^2"] += bool(boundary_H(h))
        fails["dF dH + dH dF"] += bool(boundary_F(h) + boundary_H(f))
        for k in range(1, len(tau.base) + 1):
            for sigma in combinations(tau.base, k):
                if aw_chain(f, sigma) != tensor_boundary_F(aw_chain(c, sigma)):
                    fails["AW dF = dF AW"] += 1
    fails["generators"] = len(gens)
    return fails
