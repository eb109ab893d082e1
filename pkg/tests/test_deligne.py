import random
from fractions import Fraction

import pytest

from fiberint.complexes import Chain
from fiberint.deligne import (BoundaryNonEmpty, DeligneRep, LevelMismatch, RelationViolated, circle_cycle,
                              class_equal, class_report, curvature, deligne_product, fundamental_cocycle,
                              holonomy, is_flat, projection_formula_check, pushforward, to_cech,
                              transgression_rep, trivial_rep, validate_rep)
from fiberint.examples import cylinder, torus, torus_fiber_twist
from fiberint.integration import fiber_integrate_space
from fiberint.nerve import nerve_symbols, random_form, random_recipe
from fiberint.plforms import coboundary, integrate_cycle


@pytest.fixture(scope="module")
def B():
    return torus()


@pytest.fixture(scope="module")
def rep(B):
    return transgression_rep(B.K, fundamental_cocycle(B, circle_cycle(B.L), 1), B.NK)


POINT = [Chain({(0,): 1})]


def test_transgression_rep_is_valid(rep):
    assert validate_rep(rep).ok
    assert to_cech(rep).relation_failures(rep.alpha) == []
    assert not is_flat(rep)


def test_fundamental_cocycle_is_a_cocycle(B):
    c = fundamental_cocycle(B, circle_cycle(B.L), 2)
    assert coboundary(B.K, c) == {}


def test_broken_relation_is_reported(rep):
    bad = DeligneRep(rep.level, rep.Lam, rep.alpha.scale(2), rep.beta)
    with pytest.raises(RelationViolated):
        validate_rep(bad)
    assert not validate_rep(bad, strict=False).ok


def test_pushforward_curvature_and_period(B, rep):
    pr = pushforward(rep, B)
    assert pr.level == rep.level - 1
    assert validate_rep(pr).ok
    assert curvature(pr) == fiber_integrate_space(curvature(rep), B)
    assert integrate_cycle(curvature(pr), circle_cycle(B.L)) == 1


def test_pushforward_needs_closed_fibers():
    C = cylinder()
    r = transgression_rep(C.K, {C.K.maximal()[0]: 1}, C.NK)
    with pytest.raises(BoundaryNonEmpty):
        pushforward(r, C)


def test_methods_agree_as_classes(B, rep):
    comb, pou = pushforward(rep, B), pushforward(rep, B, "pou")
    assert class_equal(comb, pou, POINT)


def test_flat_twist_changes_holonomy(B, rep):
    twisted = rep.twist(torus_fiber_twist(B))
    assert validate_rep(twisted).ok
    plain, moved = pushforward(rep, B), pushforward(twisted, B)
    assert curvature(plain) == curvature(moved)
    assert (holonomy(moved, POINT[0]) - holonomy(plain, POINT[0])) % 1 == Fraction(2, 3)
    assert not class_equal(plain, moved, POINT)
    assert not class_report(plain, moved, POINT).ok


def test_twist_by_integer_cocycle_keeps_class(B, rep):
    twisted = rep.twist(torus_fiber_twist(B, Fraction(1)))
    assert class_equal(pushforward(rep, B), pushforward(twisted, B), POINT)


def test_level_mismatch(B, rep):
    with pytest.raises(LevelMismatch):
        class_equal(rep, pushforward(rep, B), POINT)


def test_product_with_itself_is_valid(B, rep):
    pr = pushforward(rep, B)
    prod = deligne_product(pr, pr)
    assert prod.level == 1
    assert validate_rep(prod).ok


def test_trivial_rep_is_flat(B):
    r = trivial_rep(B.NL, 0)
    assert is_flat(r) and validate_rep(r).ok


def test_projection_formula_on_star_cover_fails_at_chain_level(B):
    # ∧₁ splits at each K-vertex while the chart sends a base vertex to a whole
    # fiber block; on the star cover the two sides differ at the chain level.
    rng = random.Random(5)
    w1 = random_form(B.NK, 1, rng, max_poly=1)
    w2 = random_recipe(nerve_symbols(B.NL), 0, rng, max_poly=1).on(B.NL)
    rep = projection_formula_check(w1, w2, B, samples=1)
    assert not rep.ok
    assert float(rep.checks["max discrepancy"]) > 1e-3


def test_projection_formula_rejects_other_nerves(B):
    w = random_form(B.NL, 1, random.Random(0), max_poly=1)
    with pytest.raises(ValueError):
        projection_formula_check(w, w, B)
