"""Piecewise-polynomial global forms on a simplicial complex."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .complexes import Chain, SimplicialComplex
from .nerve import IncompatibleForm, NerveForm, facets, space_restriction
from .polyform import PolyForm


class SpaceForm:
    """A form on ``|K|`` given by one PolyForm per simplex, compatible under faces."""

    def __init__(self, complex: SimplicialComplex, values: Mapping | None = None):
        self.complex = complex
        self.values = {s: v for s, v in (values or {}).items() if not v.is_zero()}

    @classmethod
    def from_tops(cls, K: SimplicialComplex, fn: Callable) -> "SpaceForm":
        vals: dict = {}
        for top in K.maximal():
            stack = [(top, fn(top))]
            while stack:
                rho, form = stack.pop()
                old = vals.get(rho)
                if old is not None:
                    if old != form:
                        raise IncompatibleForm(f"values disagree on {rho!r}")
                    continue
                vals[rho] = form
                for f in facets(rho):
                    stack.append((f, space_restriction(form, rho, f)))
        return cls(K, vals)

    def get(self, rho) -> PolyForm:
        v = self.values.get(tuple(rho))
        return v if v is not None else PolyForm.zero((len(rho) - 1,))

    __getitem__ = get

    def __add__(self, other):
        keys = set(self.values) | set(other.values)
        return SpaceForm(self.complex, {k: self.get(k) + other.get(k) for k in keys})

    def __neg__(self):
        return SpaceForm(self.complex, {k: -v for k, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return SpaceForm(self.complex, {k: v.scale(c) for k, v in self.values.items()})

    def wedge(self, other):
        keys = set(self.values) & set(other.values)
        return SpaceForm(self.complex, {k: self.values[k].wedge(other.values[k]) for k in keys})

    def d(self):
        return SpaceForm(self.complex, {k: v.d() for k, v in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, SpaceForm):
            return NotImplemented
        return self.complex == other.complex and self.values == other.values

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.values

    def is_compatible(self) -> bool:
        for rho in self.complex:
            for f in facets(rho):
                if space_restriction(self.get(rho), rho, f) != self.get(f):
                    return False
        return True

    def integrate(self, chain: Mapping) -> Fraction:
        """Integral over a chain of simplices (increasing vertex order, signed)."""
        total = Fraction(0)
        for s, c in chain.items():
            v = self.get(s)
            if v.is_zero():
                continue
            total += c * v.homogeneous(len(s) - 1).integrate_top()
        return total

    def epsilon(self, nerve) -> NerveForm:
        """``ε^*``: the same form on every nerve cell, constant along the index factor."""
        vals = {}
        for cell in nerve.cells():
            key, rho = cell
            v = self.values.get(rho)
            if v is None:
                continue
            from .nerve import cell_dims

            dims = cell_dims(cell)
            vals[cell] = v.embed(dims, [len(dims) - 1])
        return NerveForm(nerve, vals)

    def __repr__(self):
        return f"SpaceForm({len(self.values)} nonzero simplices, degrees={sorted({d for v in self.values.values() for d in v.degrees()})})"


def whitney_space(K: SimplicialComplex, cochain: Mapping) -> SpaceForm:
    """Whitney form of a simplicial cochain ``{simplex: value}`` of one degree."""
    from math import factorial

    from .nerve import elementary_form

    items = {tuple(s): Fraction(v) for s, v in cochain.items() if v}
    if not items:
        return SpaceForm(K)
    k = len(next(iter(items))) - 1
    from itertools import combinations

    def fn(rho):
        dims = (len(rho) - 1,)
        acc = PolyForm.zero(dims)
        for I in combinations(range(len(rho)), k + 1):
            c = items.get(tuple(rho[i] for i in I))
            if c:
                acc = acc + elementary_form(dims, 0, I).scale(c)
        return acc.scale(factorial(k))

    return SpaceForm.from_tops(K, fn)


def coboundary(K: SimplicialComplex, cochain: Mapping) -> dict:
    """Simplicial coboundary of a cochain ``{simplex: value}``."""
    items = {tuple(s): v for s, v in cochain.items() if v}
    if not items:
        return {}
    k = len(next(iter(items))) - 1
    out = {}
    for s in K.simplices(k + 1):
        v = sum(((-1) ** j) * items.get(s[:j] + s[j + 1:], 0) for j in range(len(s)))
        if v:
            out[s] = v
    return out


def integrate_cycle(form: SpaceForm, cycle: Chain) -> Fraction:
    return form.integrate(cycle)
