"""Small bundles used by the tests, the CLI and the benchmarks.

Base: the boundary of a triangle, vertices ``0, 1, 2``.  Total-space vertex
``(i, h)`` over base vertex ``i`` gets the integer id ``m*i + h``.
"""
from __future__ import annotations

from fractions import Fraction

from .bundle import BundleTriangulation, suggest_orientation, validate_bundle
from .complexes import SimplicialComplex, build_complex
from .nerve import NerveForm
from .polyform import PolyForm


def circle(n: int = 3) -> SimplicialComplex:
    return build_complex([(i, (i + 1) % n) for i in range(n)])


def _bundle(L, triangles, nverts, per, fiber_dim=1, orientation=None) -> BundleTriangulation:
    K = build_complex(triangles, vertices=list(range(nverts)))
    vmap = {v: v // per for v in range(nverts)}
    if orientation is None:
        orientation = suggest_orientation(K, L, vmap, fiber_dim)
    return validate_bundle(K, L, vmap, fiber_dim, orientation)


def cylinder(diagonal: str = "up") -> BundleTriangulation:
    """Staircase triangulation of ``S^1 × [0, 1]`` over the 3-vertex circle.

    ``diagonal="up"`` uses the edges ``(i,0)-(i+1,1)``; ``"down"`` uses
    ``(i,1)-(i+1,0)``.  Both restrict to the same triangulation of the boundary.
    """
    v = lambda i, h: 2 * (i % 3) + h
    tris = []
    for i in range(3):
        if diagonal == "up":
            tris += [(v(i, 0), v(i, 1), v(i + 1, 1)), (v(i, 0), v(i + 1, 0), v(i + 1, 1))]
        elif diagonal == "down":
            tris += [(v(i, 0), v(i, 1), v(i + 1, 0)), (v(i, 1), v(i + 1, 0), v(i + 1, 1))]
        else:
            raise ValueError(f"unknown diagonal {diagonal!r}")
    return _bundle(circle(), tris, 6, 2)


def torus() -> BundleTriangulation:
    """Staircase triangulation of the 3×3 torus, projected to the first factor."""
    v = lambda i, j: 3 * (i % 3) + (j % 3)
    tris = []
    for i in range(3):
        for j in range(3):
            tris += [(v(i, j), v(i + 1, j), v(i + 1, j + 1)), (v(i, j), v(i, j + 1), v(i + 1, j + 1))]
    return _bundle(circle(), tris, 9, 3)


def trivial_bundle(L: SimplicialComplex) -> BundleTriangulation:
    """The identity map ``L → L`` (fiber a point)."""
    K = SimplicialComplex(L.vertices, L.maximal())
    tops = {s: 1 for s in L.maximal()}
    return validate_bundle(K, L, {v: v for v in L.vertices}, 0, tops)


def cylinder_fiber_volume(B: BundleTriangulation) -> NerveForm:
    """``d`` of the height coordinate on the staircase cylinder: fiber volume 1."""
    from .nerve import Recipe, nerve_symbols

    syms = nerve_symbols(B.NK)
    height = Recipe(syms, PolyForm.zero((1,) * len(syms)))
    for w in B.K.vertices:
        if w % 2:
            height = height + Recipe.symbol(syms, ("X", w))
    return height.d().on(B.NK)


def torus_fiber_twist(B: BundleTriangulation, value=Fraction(1, 3)):
    """Closed PL 1-form on the torus with period ``value`` around each fiber circle.

    The cocycle charges the edges crossing the seam between fiber heights 2 and 0.
    """
    from .plforms import coboundary, whitney_space

    c: dict = {}
    for i in range(3):
        for edge in ((3 * i + 2, 3 * i), (3 * i + 2, 3 * ((i + 1) % 3))):
            s, e = B.K.canonical(edge)
            c[e] = c.get(e, 0) + s * Fraction(value)
    assert not coboundary(B.K, c)
    return whitney_space(B.K, c)
