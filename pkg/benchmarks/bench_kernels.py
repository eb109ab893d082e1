"""Compare the compiled and pure-Python term kernels on random exact forms.

Run with ``python benchmarks/bench_kernels.py [--terms N] [--repeat R]``.
"""
from __future__ import annotations

import argparse
import random
import timeit
from fractions import Fraction

from fiberint import _kernels_py

try:
    from fiberint import _kernels as _compiled
except ImportError:
    _compiled = None


def random_terms(rng: random.Random, nvars: int, nterms: int, degree: int) -> dict:
    out = {}
    for _ in range(nterms):
        e = tuple(rng.randint(0, 3) for _ in range(nvars))
        d = tuple(sorted(rng.sample(range(nvars), degree)))
        out[(e, d)] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5))
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--terms", type=int, default=60)
    ap.add_argument("--vars", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=5)
    ns = ap.parse_args()
    rng = random.Random(0)
    a = random_terms(rng, ns.vars, ns.terms, 1)
    b = random_terms(rng, ns.vars, ns.terms, 1)
    backends = [("python", _kernels_py)] + ([("cython", _compiled)] if _compiled else [])
    reference = None
    for name, mod in backends:
        result = mod.wedge_terms(a, b), mod.d_terms(a, ns.vars)
        if reference is None:
            reference = result
        elif result != reference:
            raise SystemExit(f"{name} kernels disagree with the Python reference")
        w = min(timeit.repeat(lambda: mod.wedge_terms(a, b), number=3, repeat=ns.repeat)) / 3
        d = min(timeit.repeat(lambda: mod.d_terms(a, ns.vars), number=20, repeat=ns.repeat)) / 20
        print(f"{name:7s} wedge {w * 1e3:8.3f} ms   d {d * 1e3:8.3f} ms")
    if _compiled is None:
        print("compiled kernels not built; install Cython and reinstall to compare")


if __name__ == "__main__":
    main()
