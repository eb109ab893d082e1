import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fiberint.examples import cylinder
from fiberint.io import (DanglingReference, ParseError, format_term, load_bundled, parse_term, parse_text,
                         serialize_complex, serialize_form, serialize_workspace)
from fiberint.nerve import random_form
from fiberint.polyform import PolyForm


@pytest.fixture(scope="module")
def ws():
    return load_bundled()


def test_bundled_fixtures(ws):
    assert {"cylinder", "cylinder_down", "torus"} <= set(ws.bundles)
    assert {"fibervol", "omega_up", "omega_down"} <= set(ws.forms)
    assert {"torus_k1", "torus_twist"} <= set(ws.reps)
    assert {"circle_z", "circle_pt", "torus_z"} <= set(ws.cycles)


def test_fixtures_match_constructors(ws):
    B = ws.bundles["cylinder"]
    ref = cylinder("up")
    assert B.K == ref.K and B.L == ref.L
    assert ws.forms["fibervol"].is_compatible()


def test_workspace_round_trip(ws):
    text = serialize_workspace(ws)
    again = parse_text(text, "<round trip>")
    assert serialize_workspace(again) == text
    for name, form in ws.forms.items():
        assert again.forms[name] == form


@given(st.integers(0, 10_000), st.integers(0, 2))
def test_random_form_round_trip(seed, k):
    B = cylinder()
    w = random_form(B.NK, k, random.Random(seed), max_poly=1)
    head = serialize_complex("tot", B.K) + "\n" + serialize_complex("base", B.L) + "\n"
    from fiberint.io import serialize_bundle

    text = head + serialize_bundle("b", B, "tot", "base") + "\n" + serialize_form("w", w, ("b", "NK"))
    assert parse_text(text).forms["w"] == w


@given(st.lists(st.integers(0, 3), min_size=3, max_size=3), st.fractions(-5, 5, max_denominator=7),
       st.sets(st.integers(0, 2), max_size=3))
def test_term_round_trip(exps, coef, diffs):
    dims = (1, 2)
    key = (tuple(exps), tuple(sorted(diffs)))
    if coef == 0:
        return
    f = PolyForm(dims, {key: coef})
    toks = format_term(key, coef, f).split()
    assert parse_term(toks, dims) == (key, coef)


def test_unsorted_differentials_carry_a_sign():
    (key, c) = parse_term(["1", "1", "dt2^dt1"], (2,))
    assert key == ((0, 0), (0, 1)) and c == Fraction(-1)


@pytest.mark.parametrize("text, line", [
    ("complex a\nvertex 0\n", 1),
    ("nonsense here\n", 1),
    ("complex a\nend\ncomplex a\nend\n", 3),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as info:
        parse_text(text, "f.txt")
    assert info.value.line == line
    assert str(info.value).startswith(f"f.txt:{line}:")


def test_dangling_reference():
    with pytest.raises(DanglingReference):
        parse_text("form w\nnerve nowhere NK\nend\n")


def test_comments_are_ignored():
    ws = parse_text("# header\ncomplex c  # trailing\nvertex 0\nvertex 1\nsimplex 0 1\nend\n")
    assert ws.complexes["c"].dim == 1
