from fractions import Fraction
from itertools import combinations

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import oracles
from fiberint.polyform import (BlockMismatch, NotTopDegree, PolyForm, dirichlet, ell_sign,
                               groupsum_pushforward, simplex_volume)

coefs = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def polyforms(draw, dims=None, degree=None, max_exp=2):
    if dims is None:
        dims = tuple(draw(st.lists(st.integers(0, 2), min_size=1, max_size=2)))
    n = sum(dims)
    k = draw(st.integers(0, n)) if degree is None else degree
    diffs = list(combinations(range(n), k))
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        e = tuple(draw(st.integers(0, max_exp)) for _ in range(n))
        terms[(e, draw(st.sampled_from(diffs)))] = draw(coefs)
    return PolyForm(dims, terms)


def test_eliminated_coordinate_differential():
    dims = (2,)
    t0, t1 = PolyForm.coord(dims, 0, 0), PolyForm.coord(dims, 0, 1)
    assert t0.d() == -PolyForm.coord(dims, 0, 1).d() - PolyForm.coord(dims, 0, 2).d()
    assert (t0 * t1).d() == t1 * (t0.d()) + t0 * t1.d()


def test_variable_names():
    assert PolyForm.zero((2,)).var_name(1) == "t2"
    f = PolyForm.zero((1, 2))
    assert [f.var_name(v) for v in range(3)] == ["t0_1", "t1_1", "t1_2"]


@given(polyforms())
def test_d_squared_vanishes(f):
    assert f.d().d().is_zero()


@given(st.data())
def test_d_and_wedge_match_symbolic(data):
    dims = data.draw(st.sampled_from([(1,), (2,), (1, 1), (3,)]))
    a, b = data.draw(polyforms(dims)), data.draw(polyforms(dims))
    xs, sa = oracles.to_sympy(a)
    _, sb = oracles.to_sympy(b)
    assert oracles.to_sympy(a.d())[1] == oracles.sympy_d(xs, sa, a.nvars)
    assert oracles.to_sympy(a.wedge(b))[1] == oracles.sympy_wedge(sa, sb)


@given(st.data())
def test_leibniz_rule(data):
    dims = data.draw(st.sampled_from([(2,), (1, 1)]))
    k = data.draw(st.integers(0, 2))
    a, b = data.draw(polyforms(dims, k)), data.draw(polyforms(dims))
    assert a.wedge(b).d() == a.d().wedge(b) + a.wedge(b.d()).scale((-1) ** k)


@given(st.data())
def test_graded_commutativity(data):
    dims = (3,)
    k, l = data.draw(st.integers(0, 3)), data.draw(st.integers(0, 3))
    a, b = data.draw(polyforms(dims, k)), data.draw(polyforms(dims, l))
    assert a.wedge(b) == b.wedge(a).scale((-1) ** (k * l))


@given(st.lists(st.integers(0, 4), min_size=1, max_size=3))
def test_dirichlet_against_symbolic(exps):
    assert dirichlet(exps) == oracles.dirichlet_oracle([0] + exps)


@given(polyforms(dims=(2,), degree=2, max_exp=3))
def test_integrate_top_against_symbolic(f):
    xs, coeffs = oracles.to_sympy(f)
    expected = oracles.sympy_simplex_integral(coeffs.get((0, 1), 0), list(xs[:2]), 2)
    expected = sp.Rational(expected)
    assert f.integrate_top() == Fraction(int(expected.p), int(expected.q))


def test_integrate_top_rejects_lower_degree():
    with pytest.raises(NotTopDegree):
        PolyForm.coord((2,), 0, 1).d().integrate_top()


def test_block_mismatch():
    with pytest.raises(BlockMismatch):
        PolyForm.zero((1,)) + PolyForm.zero((2,))


@given(st.data())
def test_pullback_commutes_with_d(data):
    src = (2,)
    f = data.draw(polyforms((1, 1)))
    s = [PolyForm.coord(src, 0, j) for j in range(3)]
    # Δ^2 → Δ^1 × Δ^1 by (t1 + t2, t2), which lands in the square
    images = [s[1] + s[2], s[2]]
    assert f.pullback(src, images).d() == f.d().pullback(src, images)


@pytest.mark.parametrize("sizes", [[2, 1], [1, 2], [2, 2], [3, 1], [1, 1, 2], [2, 1, 2]])
def test_groupsum_pushforward_preserves_total_integral(sizes):
    N = sum(sizes) - 1
    vol = simplex_volume(N)
    for j in range(N + 1):
        f = PolyForm.coord((N,), 0, j) * PolyForm.coord((N,), 0, N - j) * vol
        pushed = groupsum_pushforward(f, 0, sizes)
        assert pushed.dims == (len(sizes) - 1,)
        assert pushed.integrate_top() == f.integrate_top()


def test_ell_sign_is_a_sign():
    for sizes in ([1, 1], [2, 1], [1, 2], [2, 2], [3, 2]):
        assert ell_sign(sizes) in (1, -1)


@given(polyforms(dims=(2,)), st.lists(st.floats(0, 0.5), min_size=2, max_size=2))
def test_evaluate_matches_symbolic(f, pt):
    xs, coeffs = oracles.to_sympy(f)
    num = f.evaluate(pt)
    for d, c in coeffs.items():
        assert num.get(d, 0.0) == pytest.approx(float(c.subs(dict(zip(xs, pt)))), abs=1e-12)
