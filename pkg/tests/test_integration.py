import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiberint.examples import cylinder, cylinder_fiber_volume, torus
from fiberint.integration import (aw_chain, consistency_check, epsilon_prime, fiber_integrate_nw, integrate_KL,
                                  integrate_pou, pou_stokes_residual, pullback_base, stokes_residual,
                                  tensor_boundary_F)
from fiberint.bundle import boundary_F
from fiberint.nerve import random_form, random_recipe, nerve_symbols
from fiberint.polyform import PolyForm

BUNDLES = {"cylinder": cylinder("up"), "cylinder_down": cylinder("down"), "torus": torus()}
seeds = st.integers(0, 10_000)
names = st.sampled_from(sorted(BUNDLES))


@settings(max_examples=12)
@given(names, seeds, st.integers(0, 2))
def test_stokes(name, seed, k):
    B = BUNDLES[name]
    w = random_form(B.NK, k, random.Random(seed), max_poly=1)
    assert stokes_residual(w, B).is_zero()
    assert pou_stokes_residual(w, B).is_zero()


@settings(max_examples=12)
@given(names, seeds, st.integers(1, 2))
def test_outputs_are_compatible(name, seed, k):
    B = BUNDLES[name]
    w = random_form(B.NK, k, random.Random(seed), max_poly=1)
    assert consistency_check(w, B)
    assert integrate_KL(w, B).is_compatible()
    assert integrate_pou(w, B).is_compatible()


def test_integral_lowers_degree_by_fiber_dimension():
    B = BUNDLES["torus"]
    w = random_form(B.NK, 2, random.Random(0), max_poly=1)
    assert integrate_KL(w, B).degrees() <= {1}


def test_fiber_volume_integrates_to_one():
    B = BUNDLES["cylinder"]
    out = integrate_KL(cylinder_fiber_volume(B), B)
    for cell in B.NL.cells():
        sigma, eta = cell
        if len(sigma) == 1:
            assert out.get(cell) == PolyForm.constant((0, len(eta) - 1), 1)


@settings(max_examples=8)
@given(names, seeds, st.integers(1, 2))
def test_pulled_back_cover_route(name, seed, k):
    B = BUNDLES[name]
    nu = random_form(B.NW, k, random.Random(seed), max_poly=1)
    assert integrate_KL(epsilon_prime(nu, B), B) == fiber_integrate_nw(nu, B)


def test_base_forms_integrate_to_zero_on_closed_fibers():
    B = BUNDLES["torus"]
    beta = random_recipe(nerve_symbols(B.NL), 1, random.Random(5), max_poly=1).on(B.NL)
    pulled = pullback_base(beta, B)
    assert pulled.is_compatible()
    # a form pulled back from the base has no fiber component to integrate
    assert integrate_KL(pulled, B).is_zero()


def test_aw_commutes_with_fiber_boundary():
    B = BUNDLES["cylinder"]
    for eta in B.L.maximal():
        F = B.fundamental_class(eta)
        for sigma in (eta[:1], eta):
            assert aw_chain(boundary_F(F), sigma) == tensor_boundary_F(aw_chain(F, sigma))


def test_cylinders_disagree_but_share_boundary():
    up, down = BUNDLES["cylinder"], BUNDLES["cylinder_down"]
    assert up.L == down.L
    bd = lambda B: sorted(r for r in B.K if len(r) == 2 and all(v % 2 == r[0] % 2 for v in r))
    assert bd(up) == bd(down)
    assert set(up.K.maximal()) != set(down.K.maximal())
