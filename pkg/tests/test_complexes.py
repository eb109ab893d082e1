from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fiberint.complexes import (Chain, DegenerateSimplex, UnknownSimplex, barycentric_subdivision,
                                boundary_chain, build_complex, permutation_sign, triangulated_nerve)
from fiberint.examples import circle


@st.composite
def complexes(draw):
    n = draw(st.integers(3, 6))
    gens = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=1, max_size=4, unique=True),
                         min_size=1, max_size=5))
    return build_complex(gens)


def test_degenerate_simplex_rejected():
    with pytest.raises(DegenerateSimplex):
        build_complex([(0, 1, 1)])


def test_unknown_simplex():
    with pytest.raises(UnknownSimplex):
        circle().require((0, 1, 2))


@given(st.permutations(range(5)))
def test_permutation_sign_counts_inversions(perm):
    inv = sum(1 for i, j in combinations(range(5), 2) if perm[i] > perm[j])
    assert permutation_sign(perm) == (-1) ** inv


@given(complexes())
def test_closed_under_faces(K):
    for s in K:
        for k in range(1, len(s)):
            for f in combinations(s, k):
                assert f in K


@given(complexes())
def test_boundary_squared(K):
    for k in range(K.dim + 1):
        for s in K.simplices(k):
            assert boundary_chain(boundary_chain(Chain({s: 1}))) == Chain()


@given(complexes(), st.data())
def test_canonical_sign(K, data):
    s = data.draw(st.sampled_from(list(K)))
    perm = data.draw(st.permutations(s))
    sign, c = K.canonical(perm)
    assert c == s
    assert sign == permutation_sign([s.index(v) for v in perm])


def test_circle_nerve_shape():
    N = triangulated_nerve(circle())
    assert N.dim == 1
    # closed star of a vertex: the vertex, two edges and their far ends
    assert len(N.cells(0)) == 3 * 5
    # closed star of an edge: the edge and its two vertices
    assert len(N.cells(1)) == 3 * 3


def test_subdivision_counts_and_carriers():
    S = barycentric_subdivision(circle())
    assert len(S.complex.simplices(0)) == 6
    assert len(S.complex.simplices(1)) == 6
    for v, c in S.carrier.items():
        assert set(v) <= set(c)


def test_second_subdivision_with_common_choice_is_alpha_compatible():
    once = barycentric_subdivision(circle(), alpha="common")
    twice = barycentric_subdivision(once, alpha="common")
    assert twice.alpha_violations() == []


def test_single_subdivision_violates_star_condition():
    # a barycenter of an edge sees both endpoints in its closed star
    assert barycentric_subdivision(circle()).alpha_violations()
