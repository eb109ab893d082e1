"""Reference computations written independently of the package."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import factorial

import numpy as np
import sympy as sp


# -- quadrature on a simplex ----------------------------------------------------------


def _duffy_midpoint(f, q: int, n: int) -> float:
    """Midpoint rule on the cube pushed to Δ^q by the collapsed (Duffy) map."""
    u = (np.arange(n) + 0.5) / n
    grids = np.meshgrid(*([u] * q), indexing="ij")
    x, rest, jac = [], np.ones_like(grids[0]), np.ones_like(grids[0])
    for k in range(q):
        x.append(rest * grids[k])
        jac = jac * rest
        rest = rest * (1 - grids[k])
    return float(np.sum(f(x) * jac) / n**q)


def simplex_quadrature(f, q: int, tol: float = 1e-6, start: int = 8, max_n: int = 512) -> float:
    """``∫_{Δ^q} f`` in coordinates ``x_1…x_q`` (``x_0 = 1 - Σx``), refined until two
    Richardson-extrapolated midpoint values agree to ``tol``."""
    if q == 0:
        return float(f([]))
    n = start
    prev_mid = _duffy_midpoint(f, q, n)
    prev = None
    while n < max_n:
        n *= 2
        mid = _duffy_midpoint(f, q, n)
        extrap = (4 * mid - prev_mid) / 3
        if prev is not None and abs(extrap - prev) < tol:
            return extrap
        prev, prev_mid = extrap, mid
    return prev


def monomial_integral_oracle(exps: tuple) -> float:
    """``∫_{Δ^q} Π_{j=0..q} t_j^{a_j}`` with the standard volume, by quadrature."""
    q = len(exps) - 1

    def f(x):
        t0 = 1 - sum(x) if x else 1.0
        val = t0 ** exps[0]
        for j in range(q):
            val = val * x[j] ** exps[j + 1]
        return val

    return simplex_quadrature(f, q)


# -- symbolic exterior calculus ---------------------------------------------------------


def to_sympy(form, names: str = "x"):
    """A PolyForm as ``{differentials: sympy coefficient}`` in its stored variables."""
    xs = sp.symbols(f"{names}1:{form.nvars + form.nparams + 1}")
    out = {}
    for (e, d), c in form.terms.items():
        mono = sp.Rational(c.numerator, c.denominator)
        for v, k in enumerate(e):
            mono *= xs[v] ** k
        out[d] = out.get(d, 0) + mono
    return xs, {d: sp.expand(v) for d, v in out.items() if sp.expand(v) != 0}


def sympy_d(xs, coeffs: dict, nvars: int) -> dict:
    out: dict = {}
    for d, c in coeffs.items():
        for v in range(nvars):
            if v in d:
                continue
            dc = sp.diff(c, xs[v])
            if dc == 0:
                continue
            new = tuple(sorted(d + (v,)))
            sign = (-1) ** sum(1 for x in d if x < v)
            out[new] = out.get(new, 0) + sign * dc
    return {d: sp.expand(v) for d, v in out.items() if sp.expand(v) != 0}


def sympy_wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for d1, c1 in a.items():
        for d2, c2 in b.items():
            if set(d1) & set(d2):
                continue
            seq = d1 + d2
            inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
            key = tuple(sorted(seq))
            out[key] = out.get(key, 0) + (-1) ** inv * c1 * c2
    return {d: sp.expand(v) for d, v in out.items() if sp.expand(v) != 0}


def sympy_simplex_integral(expr, xs, q: int):
    """Iterated exact integral over ``{x ≥ 0, Σx ≤ 1}`` in ``xs[:q]``."""
    val = expr
    for k in reversed(range(q)):
        upper = 1 - sum(xs[:k])
        val = sp.integrate(val, (xs[k], 0, upper))
    return sp.expand(val)


# -- Čech cup product on a plain nerve ----------------------------------------------------


def cup_oracle(c1: dict, c2: dict, p: int, q: int, k1: int, nerve) -> dict:
    """``(c1 ∪ c2)(i_0…i_{p+q}) = (−1)^{k1 q} c1(i_0…i_p) ∧ c2(i_p…i_{p+q})`` on every cell."""
    out = {}
    for sigma in nerve.index.simplices(p + q):
        for rho in nerve.star(sigma):
            a = c1.get((sigma[: p + 1], rho))
            b = c2.get((sigma[p:], rho))
            if a is None or b is None:
                continue
            v = a.wedge(b).scale((-1) ** (k1 * q))
            if not v.is_zero():
                out[(sigma, rho)] = v
    return out


# -- counting ------------------------------------------------------------------------------


def staircase_count(q_total: int, p: int) -> int:
    """Top simplices of the staircase triangulation of Δ^p × Δ^q: binomial(p+q, p)."""
    return factorial(p + q_total) // (factorial(p) * factorial(q_total))


def dirichlet_oracle(exps) -> Fraction:
    """Exact Dirichlet integral via sympy iterated integration (independent of the package)."""
    q = len(exps) - 1
    xs = sp.symbols(f"y1:{q + 1}") if q else ()
    t0 = 1 - sum(xs) if q else 1
    expr = t0 ** exps[0]
    for j in range(q):
        expr *= xs[j] ** exps[j + 1]
    val = sympy_simplex_integral(sp.expand(expr), list(xs), q) if q else sp.Integer(1)
    return Fraction(int(sp.fraction(val)[0]), int(sp.fraction(val)[1]))
