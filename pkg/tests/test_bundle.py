from fractions import Fraction
from itertools import combinations
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fiberint.bundle import (FiberDimMismatch, InconsistentOrientation, NonSimplicialMap, all_prismatic,
                             boundary_F, boundary_H, chain_to_simplicial, ell_point, validate_bundle)
from fiberint.complexes import Chain, boundary_chain, build_complex
from fiberint.examples import circle, cylinder, torus, trivial_bundle
from fiberint.integration import prism_checks


def _brute_over(B, eta):
    """All K-simplices whose vertex images are exactly the vertices of eta."""
    out = []
    verts = sorted(B.K.vertices, key=B.K.pos.get)
    for k in range(1, len(verts) + 1):
        for s in combinations(verts, k):
            if s in B.K and {B.vmap[v] for v in s} == set(eta):
                out.append(s)
    return out


@pytest.mark.parametrize("make", [lambda: cylinder("up"), lambda: cylinder("down"), torus])
def test_prismatic_enumeration_matches_brute_force(make):
    B = make()
    for eta in B.L:
        over = _brute_over(B, eta)
        for fd in range(B.n + 1):
            expect = sorted(s for s in over if len(s) - len(eta) == fd)
            got = sorted(t.simplex for t in B.enumerate_prismatic(eta, fd))
            assert got == expect
    assert len(all_prismatic(B)) == len(list(B.K))


def test_staircase_top_count():
    # a staircase over a p-simplex with interval fibers has binomial(p + 1, p) tops
    for B in (cylinder(), torus()):
        for eta in B.L.maximal():
            p = len(eta) - 1
            fibre_verts = len(B.fiber(eta[0]).vertices)
            expected = comb(p + 1, p) if fibre_verts == 2 else 3 * comb(p + 1, p)
            assert len(B.top_prismatic(eta)) == expected


def test_fundamental_class_boundaries():
    for eta in torus().L.maximal():
        F = torus().fundamental_class(eta)
        assert boundary_F(F) == Chain()
    B = cylinder()
    for eta in B.L.maximal():
        F = B.fundamental_class(eta)
        # open fibers: the fiber boundary is the top and bottom edge
        assert len(boundary_F(F)) == 2
        assert boundary_H(boundary_H(F)) == Chain()


def test_fundamental_class_is_a_simplicial_chain_over_eta():
    B = torus()
    for eta in B.L.maximal():
        c = chain_to_simplicial(B.fundamental_class(eta))
        assert all(B.image(s) == eta for s in c)
        # interior faces cancel: only faces over the vertices or lateral faces remain
        for f in boundary_chain(c):
            assert B.image(f) != eta or len(f) - len(eta) < B.n


@pytest.mark.parametrize("make", [cylinder, torus])
def test_prism_identities(make):
    res = prism_checks(make())
    assert res.pop("generators") > 0
    assert set(res.values()) == {0}


@given(st.lists(st.fractions(0, 1), min_size=2, max_size=2), st.data())
def test_ell_point_lands_in_simplex(t, data):
    t = [t[0], 1 - t[0]] if t[0] <= 1 else t
    blocks = []
    for _ in t:
        x = data.draw(st.fractions(0, 1))
        blocks.append((x, 1 - x))
    pt = ell_point(t, blocks)
    assert sum(pt) == 1 and all(c >= 0 for c in pt)


def test_ell_point_arity():
    with pytest.raises(ValueError):
        ell_point([Fraction(1)], [(1,), (1,)])


def test_validation_errors():
    L = circle()
    K = build_complex([(0, 1, 2)])
    with pytest.raises(NonSimplicialMap):
        validate_bundle(K, L, {0: 0, 1: 1}, 1, {})
    with pytest.raises(NonSimplicialMap):
        validate_bundle(K, L, {0: 0, 1: 1, 2: 9}, 1, {})
    # a triangle mapped onto an edge has fiber dimension 1, not 0
    with pytest.raises((FiberDimMismatch, NonSimplicialMap)):
        validate_bundle(K, L, {0: 0, 1: 0, 2: 1}, 0, {(0, 1, 2): 1})


def test_orientation_errors():
    B = cylinder()
    tops = B.top_simplices()
    good = {r: B.orientation(r) for r in tops}
    with pytest.raises(InconsistentOrientation):
        validate_bundle(B.K, B.L, B.vmap, 1, {r: s for r, s in list(good.items())[1:]})
    flipped = dict(good)
    flipped[tops[0]] = -flipped[tops[0]]
    with pytest.raises(InconsistentOrientation):
        validate_bundle(B.K, B.L, B.vmap, 1, flipped)


def test_trivial_bundle():
    B = trivial_bundle(circle())
    assert B.n == 0
    for eta in B.L.maximal():
        assert B.fundamental_class(eta) and all(t.fdim == 0 for t in B.fundamental_class(eta))
