import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fiberint.complexes import triangulated_nerve
from fiberint.examples import circle, cylinder
from fiberint.nerve import (CechCochain, cech_delta, i_delta, random_cochain, random_form, total_differential,
                            whitney_e)
from fiberint.polyform import PolyForm

N = triangulated_nerve(circle())
seeds = st.integers(0, 10_000)


@given(seeds, st.integers(0, 2))
def test_random_forms_are_compatible_and_normal(seed, k):
    w = random_form(N, k, random.Random(seed))
    assert w.is_compatible()
    assert w.is_normal()
    assert w.compatibility_failures() == []


@given(seeds, st.integers(0, 2))
def test_d_squared(seed, k):
    w = random_form(N, k, random.Random(seed))
    assert w.d().d().is_zero()
    assert w.d().is_compatible()


@given(seeds, st.integers(0, 2))
def test_wedge_is_compatible_and_leibniz(seed, k):
    rng = random.Random(seed)
    a, b = random_form(N, k, rng, max_poly=1), random_form(N, 1, rng, max_poly=1)
    ab = a.wedge(b)
    assert ab.is_compatible()
    assert ab.d() == a.d().wedge(b) + a.wedge(b.d()).scale((-1) ** k)


@given(seeds, st.integers(1, 2))
def test_i_delta_is_a_chain_map(seed, k):
    w = random_form(N, k, random.Random(seed))
    for p in range(2):
        rhs = i_delta(w, p).d().scale((-1) ** p)
        if p:
            rhs = rhs + cech_delta(i_delta(w, p - 1))[p]
        assert i_delta(w.d(), p) == rhs


@given(seeds, st.integers(0, 1), st.integers(0, 1))
def test_whitney_extension_inverts_i_delta(seed, p, f):
    c = random_cochain(N, p, f, random.Random(seed), max_poly=1)
    e = whitney_e(c)
    assert e.is_compatible()
    assert i_delta(e, p) == c


@given(seeds)
def test_whitney_of_integer_cochain_is_integral(seed):
    c = random_cochain(N, 1, 0, random.Random(seed), integer=True)
    assert c.is_integral()
    assert whitney_e(c).is_integral()


def test_cech_delta_squared_plain_and_prismatic():
    rng = random.Random(3)
    c = random_cochain(N, 0, 1, rng)
    assert all(x.is_zero() for x in cech_delta(cech_delta(c)[1]).values())
    PN = cylinder().PN
    c = random_cochain(PN, (0, 0), 0, rng, integer=True)
    parts = cech_delta(c)
    total = {}
    for part in parts.values():
        for deg, x in cech_delta(part).items():
            total[deg] = total[deg] + x if deg in total else x
    assert all(x.is_zero() for x in total.values())


def test_total_differential_squared():
    c = random_cochain(N, 0, 0, random.Random(4))
    once = total_differential(c)
    acc = {}
    for part in once.values():
        for deg, x in total_differential(part).items():
            acc[deg] = acc[deg] + x if deg in acc else x
    assert all(x.is_zero() for x in acc.values())


def test_non_integral_cochain():
    cell = next(iter(N.cells(0)))
    c = CechCochain(N, 0, {cell: PolyForm.constant((len(cell[1]) - 1,), 0.5)})
    assert not c.is_integral()


def test_integer_cochain_must_be_functions():
    with pytest.raises(ValueError):
        random_cochain(N, 0, 1, random.Random(0), integer=True)
