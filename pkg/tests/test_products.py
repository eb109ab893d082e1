import random

import numpy as np
import pytest
from scipy.integrate import trapezoid
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from fiberint.complexes import triangulated_nerve
from fiberint.examples import circle
from fiberint.nerve import CechCochain, cochain_cells, random_cochain, whitney_e
from fiberint.polyform import PolyForm
from fiberint.products import BumpQuadrature, cup_product, default_quadrature, i_delta_product, wedge1

N = triangulated_nerve(circle())


def _grid_moment(kappa: float, a: int, b: int, n: int = 400_001) -> float:
    t = np.linspace(0.0, 1.0, n)[1:-1]
    raw = np.exp(-kappa / (t * (1 - t)))
    mass = trapezoid(raw, t)
    return float(trapezoid(raw * t ** (-a) * (1 - t) ** (-b), t) / mass)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_bump_moments_against_grid(kappa):
    q = BumpQuadrature(kappa=kappa)
    assert q.check() < 1e-10
    for a, b in [(0, 0), (1, 0), (0, 2), (1, 1), (2, 3)]:
        assert q.moment(a, b) == pytest.approx(_grid_moment(kappa, a, b), rel=1e-6)
        assert q.moment(a, b) == pytest.approx(q.moment(b, a), rel=1e-12)


@given(st.floats(0.01, 0.99))
def test_bump_is_symmetric(t):
    q = default_quadrature()
    assert q.phi(t) == pytest.approx(q.phi(1 - t), rel=1e-9)
    assert q.phi(t) > 0


def test_bump_rejects_nonpositive_parameter():
    with pytest.raises(ValueError):
        BumpQuadrature(kappa=0)


def _gap(got: dict, ref: dict) -> float:
    worst = 0.0
    for cell in set(got) | set(ref):
        a, e = got.get(cell), ref.get(cell)
        for key in set(a.terms if a else ()) | set(e.terms if e else ()):
            x = float(a.terms.get(key, 0)) if a else 0.0
            y = float(e.terms.get(key, 0)) if e else 0.0
            worst = max(worst, abs(x - y))
    return worst


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))
def test_product_matches_cup_oracle(seed, p1, f1, f2):
    rng = random.Random(seed)
    p2 = rng.randint(0, 1 - p1)
    c1 = random_cochain(N, p1, f1, rng, max_poly=1)
    c2 = random_cochain(N, p2, f2, rng, max_poly=1)
    got = i_delta_product(wedge1(whitney_e(c1), whitney_e(c2)), p1 + p2)
    ref = oracles.cup_oracle(c1.values, c2.values, p1, p2, f1, N)
    assert _gap(got, ref) < 1e-8


@given(st.integers(0, 10_000))
def test_package_cup_matches_oracle(seed):
    rng = random.Random(seed)
    c1 = random_cochain(N, 0, 1, rng, max_poly=1)
    c2 = random_cochain(N, 1, 0, rng, max_poly=1)
    ours = {c: v for c, v in cup_product(c1.values, c2.values, 0, 1).items() if not v.is_zero()}
    assert ours == oracles.cup_oracle(c1.values, c2.values, 0, 1, 1, N)


def test_unit_is_neutral():
    one = CechCochain(N, 0, {cell: PolyForm.constant((len(cell[1]) - 1,), 1) for cell in cochain_cells(N, 0)})
    c = random_cochain(N, 1, 0, random.Random(1), integer=True, density=1.0)
    got = i_delta_product(wedge1(whitney_e(one), whitney_e(c)), 1)
    assert _gap(got, c.values) < 1e-8
    got = i_delta_product(wedge1(whitney_e(c), whitney_e(one)), 1)
    assert _gap(got, c.values) < 1e-8


def test_wedge1_needs_one_nerve():
    from fiberint.examples import cylinder

    a = whitney_e(random_cochain(N, 0, 0, random.Random(0), integer=True))
    B = cylinder()
    b = whitney_e(random_cochain(B.NK, 0, 0, random.Random(0), integer=True))
    with pytest.raises(ValueError):
        wedge1(a, b)
