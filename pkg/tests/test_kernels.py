import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fiberint import _kernels_py as py
from fiberint import kernels

compiled = pytest.importorskip("fiberint._kernels") if kernels.BACKEND == "cython" else None


def _terms(rng: random.Random, n: int = 4) -> dict:
    out = {}
    for _ in range(rng.randint(0, 6)):
        e = tuple(rng.randint(0, 2) for _ in range(n))
        d = tuple(sorted(rng.sample(range(n), rng.randint(0, 2))))
        out[(e, d)] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return {k: v for k, v in out.items() if v}


def test_backend_is_reported():
    assert kernels.BACKEND in ("python", "cython")


@pytest.mark.skipif(compiled is None, reason="compiled kernels not built")
@given(st.integers(0, 10_000))
def test_compiled_matches_python(seed):
    rng = random.Random(seed)
    a, b = _terms(rng), _terms(rng)
    assert compiled.wedge_terms(a, b) == py.wedge_terms(a, b)
    assert compiled.d_terms(a, 4) == py.d_terms(a, 4)


@given(st.integers(0, 10_000))
def test_python_d_squared(seed):
    a = _terms(random.Random(seed))
    assert py.d_terms(py.d_terms(a, 4), 4) == {}
