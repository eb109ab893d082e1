import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiberint.complexes import triangulated_nerve
from fiberint.examples import circle
from fiberint.nerve import CechCochain, cochain_cells, nerve_symbols, random_recipe, whitney_e
from fiberint.polyform import PolyForm
from fiberint.primitive import NoPrimitive, find_primitive

N = triangulated_nerve(circle())


@settings(max_examples=10)
@given(st.integers(0, 10_000))
def test_exact_forms_have_verified_primitives(seed):
    eta = random_recipe(nerve_symbols(N), 0, random.Random(seed), max_poly=2).on(N)
    omega = eta.d()
    if omega.is_zero():
        return
    mu = find_primitive(omega)
    assert mu.d() == omega
    assert mu.is_compatible()


def test_generator_of_first_cohomology_has_no_primitive():
    # the Čech 1-cochain equal to 1 on a single edge generates H^1 of the circle
    cells = [c for c in cochain_cells(N, 1) if c[0] == (0, 1)]
    c = CechCochain(N, 1, {cell: PolyForm.constant((len(cell[1]) - 1,), 1) for cell in cells})
    omega = whitney_e(c)
    assert omega.d().is_zero()
    with pytest.raises(NoPrimitive):
        find_primitive(omega)


def test_zero_forms_have_no_primitive():
    one = random_recipe(nerve_symbols(N), 0, random.Random(1), max_poly=1).on(N)
    with pytest.raises(NoPrimitive):
        find_primitive(one)
