"""The integral-preserving product ``∧₁`` on nerve forms.

``a ∧₁ b`` averages ``ℓ_t^{-1*}(π_1^*a ∧ π_2^*b)`` against a bump density
``φ(t) dt``.  On the branch of ``ℓ_t^{-1}`` where ``R_{p-1} ≤ t < R_p``
(``R_k = r_0 + … + r_k``) the pullback is polynomial in ``r``, ``x``,
``u = 1/t`` and ``v = 1/(1-t)``; integrating ``t`` over the branch leaves a
sum of terms ``M_ab(R_{p-1}, R_p) · P_ab`` with ``P_ab`` an exact polynomial
form and ``M_ab(lo, hi) = ∫_lo^hi φ(t) t^{-a} (1-t)^{-b} dt``.  Only these
scalar weights are approximated.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from scipy import integrate

from .complexes import Nerve
from .nerve import NerveForm, cell_dims
from .polyform import PolyForm, groupsum_pushforward


class QuadratureNonConvergent(RuntimeError):
    pass


@dataclass
class BumpQuadrature:
    """Bump density ``φ(t) = c·exp(-κ/(t(1-t)))`` normalised to unit mass, with adaptive quadrature."""

    kappa: float = 1.0
    tol: float = 1e-10
    norm: float = field(init=False)

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("bump parameter must be positive")
        self.norm = 1.0
        self._cache: dict = {}
        mass = self._quad(lambda t: self._raw(t, 0, 0), 0.0, 1.0)
        self.norm = 1.0 / mass

    def _raw(self, t: float, a: int, b: int) -> float:
        if t <= 0.0 or t >= 1.0:
            return 0.0
        e = -self.kappa / (t * (1.0 - t)) - a * math.log(t) - b * math.log1p(-t)
        return math.exp(e)

    def phi(self, t: float) -> float:
        return self.norm * self._raw(t, 0, 0)

    def weight(self, t: float, a: int = 0, b: int = 0) -> float:
        """``φ(t) t^{-a} (1-t)^{-b}``; zero outside the open interval."""
        return self.norm * self._raw(t, a, b)

    def _quad(self, f, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(f, lo, hi, epsabs=self.tol * 1e-2, epsrel=1e-13, limit=200)
            except integrate.IntegrationWarning as exc:
                raise QuadratureNonConvergent(str(exc)) from None
        if err > self.tol:
            raise QuadratureNonConvergent(f"error estimate {err:.2e} above {self.tol:.1e}")
        return val

    def integral(self, a: int, b: int, lo: float, hi: float) -> float:
        """``M_ab(lo, hi)``."""
        lo, hi = max(0.0, float(lo)), min(1.0, float(hi))
        if hi <= lo:
            return 0.0
        key = (a, b, lo, hi)
        val = self._cache.get(key)
        if val is None:
            val = self._quad(lambda t: self.weight(t, a, b), lo, hi)
            self._cache[key] = val
        return val

    def moment(self, a: int, b: int) -> float:
        return self.integral(a, b, 0.0, 1.0)

    def check(self) -> float:
        """Deviation of the total mass from 1."""
        return abs(self.moment(0, 0) - 1.0)


DEFAULT_QUADRATURE: BumpQuadrature | None = None


def default_quadrature() -> BumpQuadrature:
    global DEFAULT_QUADRATURE
    if DEFAULT_QUADRATURE is None:
        DEFAULT_QUADRATURE = BumpQuadrature()
    return DEFAULT_QUADRATURE


# -- forms with bump-moment coefficients ---------------------------------------------


@dataclass(frozen=True)
class WeightedTerm:
    """``w(z) · poly`` where ``w = M_ab(lo, hi)`` (``kind="M"``) or ``φ(hi) hi^{-a}(1-hi)^{-b}`` (``"E"``).

    ``split`` remembers the branch index on unpulled product cells; it lets
    :func:`i_delta_product` integrate exactly in the index variables.
    """

    kind: str
    a: int
    b: int
    lo: PolyForm | None
    hi: PolyForm
    poly: PolyForm
    split: int | None = None


class ProductForm:
    """A sum of weighted polynomial forms on one cell."""

    def __init__(self, dims: Sequence[int], terms: Sequence[WeightedTerm] = (), quad: BumpQuadrature | None = None):
        self.dims = tuple(dims)
        self.terms = [t for t in terms if not t.poly.is_zero()]
        self.quad = quad or default_quadrature()

    @classmethod
    def exact(cls, form: PolyForm, quad=None) -> "ProductForm":
        """An exact form as a weighted one (weight ``M_00(0,1) = 1``)."""
        zero, one = PolyForm.zero(form.dims), PolyForm.constant(form.dims, 1)
        return cls(form.dims, [WeightedTerm("M", 0, 0, zero, one, form)], quad)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, PolyForm):
            other = ProductForm.exact(other, self.quad)
        return ProductForm(self.dims, self.terms + other.terms, self.quad)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ProductForm) else -other)

    def scale(self, c) -> "ProductForm":
        return ProductForm(self.dims, [_replace(t, poly=t.poly.scale(c)) for t in self.terms], self.quad)

    def wedge(self, other: PolyForm) -> "ProductForm":
        return ProductForm(self.dims, [_replace(t, poly=t.poly.wedge(other)) for t in self.terms], self.quad)

    def rwedge(self, other: PolyForm) -> "ProductForm":
        """``other ∧ self``."""
        return ProductForm(self.dims, [_replace(t, poly=other.wedge(t.poly)) for t in self.terms], self.quad)

    def d(self) -> "ProductForm":
        out = []
        for t in self.terms:
            if t.kind != "M":
                raise NotImplementedError("second derivatives of bump weights are not represented")
            out.append(_replace(t, poly=t.poly.d()))
            for sign, end in ((1, t.hi), (-1, t.lo)):
                de = end.d()
                if not de.is_zero():
                    out.append(WeightedTerm("E", t.a, t.b, None, end, de.wedge(t.poly).scale(sign)))
        return ProductForm(self.dims, out, self.quad)

    def pullback(self, source_dims, images: Sequence[PolyForm]) -> "ProductForm":
        def pb(f):
            return None if f is None else f.pullback(source_dims, images)

        return ProductForm(source_dims, [WeightedTerm(t.kind, t.a, t.b, pb(t.lo), pb(t.hi), pb(t.poly))
                                         for t in self.terms], self.quad)

    def weight(self, t: WeightedTerm, point: Sequence[float]) -> float:
        hi = _scalar_at(t.hi, point)
        if t.kind == "E":
            return self.quad.weight(hi, t.a, t.b)
        return self.quad.integral(t.a, t.b, _scalar_at(t.lo, point), hi)

    def evaluate(self, point: Sequence[float]) -> dict:
        """``{differentials: value}`` at reduced coordinates ``point``."""
        out: dict = {}
        for t in self.terms:
            w = self.weight(t, point)
            if w == 0.0:
                continue
            for d, v in t.poly.evaluate(point).items():
                out[d] = out.get(d, 0.0) + w * v
        return {d: v for d, v in out.items() if v != 0.0}

    def __repr__(self):
        return f"ProductForm({self.dims}, {len(self.terms)} weighted terms)"


def _replace(t: WeightedTerm, **kw) -> WeightedTerm:
    d = dict(kind=t.kind, a=t.a, b=t.b, lo=t.lo, hi=t.hi, poly=t.poly, split=t.split)
    d.update(kw)
    return WeightedTerm(**d)


def _scalar_at(f: PolyForm, point) -> float:
    return f.evaluate(point).get((), 0.0)


# -- the product ---------------------------------------------------------------------


def _partial_sum(dims, n: int, k: int) -> PolyForm:
    """``R_k = r_0 + … + r_k`` on the index block (``R_{-1} = 0``)."""
    acc = PolyForm.zero(dims)
    for i in range(k + 1):
        acc = acc + PolyForm.coord(dims, 0, i)
    return acc


def split_params(form: PolyForm) -> dict:
    """Group the terms of a form with parameters ``(u, v)`` by their exponents."""
    nv = form.nvars
    out: dict = {}
    for (e, d), c in form.terms.items():
        key = tuple(e[nv:])
        out.setdefault(key, {})[(tuple(e[:nv]), d)] = c
    return {k: PolyForm(form.dims, v) for k, v in out.items()}


def wedge1_cell(A: Sequence[PolyForm], Bv: Sequence[PolyForm], n: int, space_dim: int,
                quad: BumpQuadrature) -> ProductForm:
    """``∧₁`` on one cell from the front values ``A[p]`` on ``(i_0…i_p)`` and back values ``Bv[p]`` on ``(i_p…i_n)``."""
    T = (n, space_dim)
    r = [PolyForm.coord(T, 0, i, 2) for i in range(n + 1)]
    space = [PolyForm.coord(T, 1, j, 2) for j in range(1, space_dim + 1)]
    u, v = PolyForm.param(T, 0, 2), PolyForm.param(T, 1, 2)
    terms = []
    for p in range(n + 1):
        a, b = A[p], Bv[p]
        if a is None or b is None or a.is_zero() or b.is_zero():
            continue
        R = sum((r[i] for i in range(p)), PolyForm.zero(T, 2))
        front = [r[j] * u for j in range(1, p)] + ([1 - R * u] if p > 0 else [])
        back = [r[p + k] * v for k in range(1, n - p + 1)]
        fa = a.pullback(T, front + space, 2)
        fb = b.pullback(T, back + space, 2)
        lo, hi = _partial_sum(T, n, p - 1), _partial_sum(T, n, p)
        for (ea, eb), P in split_params(fa.wedge(fb)).items():
            terms.append(WeightedTerm("M", ea, eb, lo, hi, P, split=p))
    return ProductForm(T, terms, quad)


class ProductNerveForm:
    """Cellwise :class:`ProductForm` values on a plain nerve; tagged approximate."""

    approximate = True

    def __init__(self, nerve: Nerve, values: Mapping, quad: BumpQuadrature | None = None):
        self.nerve = nerve
        self.values = {c: v for c, v in values.items() if not v.is_zero()}
        self.quad = quad or default_quadrature()

    def get(self, cell) -> ProductForm:
        v = self.values.get(cell)
        return v if v is not None else ProductForm(cell_dims(cell), (), self.quad)

    def _combine(self, other, op):
        if isinstance(other, NerveForm):
            other = as_product(other, self.quad)
        keys = set(self.values) | set(other.values)
        return ProductNerveForm(self.nerve, {c: op(self.get(c), other.get(c)) for c in keys}, self.quad)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return ProductNerveForm(self.nerve, {k: v.scale(c) for k, v in self.values.items()}, self.quad)

    def d(self):
        return ProductNerveForm(self.nerve, {k: v.d() for k, v in self.values.items()}, self.quad)

    def is_zero(self) -> bool:
        return not self.values

    def evaluate(self, cell, point) -> dict:
        return self.get(cell).evaluate(point)

    def __repr__(self):
        return f"ProductNerveForm({self.nerve.name}, {len(self.values)} nonzero cells)"


def as_product(form: NerveForm, quad=None) -> ProductNerveForm:
    return ProductNerveForm(form.nerve, {c: ProductForm.exact(v, quad) for c, v in form.values.items()}, quad)


def wedge1(a: NerveForm, b: NerveForm, quad: BumpQuadrature | None = None) -> ProductNerveForm:
    """``a ∧₁ b`` on a plain nerve."""
    quad = quad or default_quadrature()
    if a.nerve != b.nerve:
        raise ValueError("forms live on different nerves")
    nerve = a.nerve
    vals = {}
    for cell in nerve.cells():
        sigma, rho = cell
        n = len(sigma) - 1
        A = [a.values.get((sigma[: p + 1], rho)) for p in range(n + 1)]
        Bv = [b.values.get((sigma[p:], rho)) for p in range(n + 1)]
        pf = wedge1_cell(A, Bv, n, len(rho) - 1, quad)
        if not pf.is_zero():
            vals[cell] = pf
    return ProductNerveForm(nerve, vals, quad)


def fiber_integrate_product(form: ProductNerveForm, B, sigma: tuple, eta: tuple) -> ProductForm:
    """Integration along the fibers of a product form on the pulled-back cover nerve, on the
    top cell ``(σ, η)``; the bump weights only see the index block and pass through."""
    n = len(sigma) - 1
    dims = (n, len(eta) - 1)
    reblock = [PolyForm.coord(dims, 0, j) for j in range(1, n + 1)]
    terms = []
    for tau, coef in B.fundamental_class(eta).items():
        v = form.values.get((sigma, tau.simplex))
        if v is None:
            continue
        sign = -coef if n * tau.fdim % 2 else coef
        sizes = [q + 1 for q in tau.qs]
        images = reblock + [PolyForm.zero(dims)] * (len(tau.simplex) - 1)
        for t in v.terms:
            poly = groupsum_pushforward(t.poly, 1, sizes).scale(sign)
            lo = None if t.lo is None else t.lo.pullback(dims, images)
            terms.append(WeightedTerm(t.kind, t.a, t.b, lo, t.hi.pullback(dims, images), poly, t.split))
    return ProductForm(dims, terms, form.quad)


# -- I_Δ of a product ------------------------------------------------------------


def _tail_mass(P: PolyForm, n: int, k: int) -> dict:
    """``t ↦ ∫_{R_k > t} P`` over the index simplex, as ``{exponent e: PolyForm}`` meaning
    ``Σ (1-t)^e · coefficient``; ``e = 0`` carries a t-independent part."""
    if k < 0:
        return {}
    if k >= n:
        return {0: P.integrate_blocks([0])}
    # base Δ^1 with reduced variable s = 1 - R_k; the region is s < 1 - t
    pushed = groupsum_pushforward(P, 0, [k + 1, n - k])
    out: dict = {}
    for (e, d), c in pushed.terms.items():
        if not d or d[0] != 0:
            continue
        m = e[0]
        rest = (e[1:], tuple(x - 1 for x in d[1:]))
        form = out.setdefault(m + 1, {})
        form[rest] = form.get(rest, 0) + c / (m + 1)
    return {e: PolyForm(P.dims[1:], t) for e, t in out.items()}


def i_delta_product(form: ProductNerveForm, degree: int) -> dict:
    """``I_Δ`` of a product form: ``{cell: PolyForm}`` with float coefficients.

    Fubini turns each weighted term into bump moments against exact
    polynomials in ``1 - t``, so only one-dimensional moments are approximated.
    """
    quad = form.quad
    out = {}
    for cell, pf in form.values.items():
        sigma, rho = cell
        n = len(sigma) - 1
        if n != degree:
            continue
        acc: dict = {}
        for t in pf.terms:
            if t.kind != "M" or t.split is None:
                raise ValueError("I_Δ needs unpulled product terms")
            top = t.poly.block_degree(0, n)
            if top.is_zero():
                continue
            for sgn, k in ((1, t.split), (-1, t.split - 1)):
                for e, poly in _tail_mass(top, n, k).items():
                    w = sgn * quad.moment(t.a, t.b - e)
                    for key, c in poly.terms.items():
                        acc[key] = acc.get(key, 0.0) + w * float(c)
        out[cell] = PolyForm((len(rho) - 1,), {k: v for k, v in acc.items() if v != 0.0})
    return out


def cup_product(c1: Mapping, c2: Mapping, p: int, q: int) -> dict:
    """Čech–de Rham cup product on ``{cell: PolyForm}`` cochains.

    ``(c1 ∪ c2)(i_0…i_{p+q}) = (-1)^{k q} c1(i_0…i_p) ∧ c2(i_p…i_{p+q})`` for a
    form degree ``k`` part of ``c1``.
    """
    out: dict = {}
    for (s1, rho), v1 in c1.items():
        if len(s1) != p + 1:
            continue
        for (s2, rho2), v2 in c2.items():
            if rho2 != rho or len(s2) != q + 1 or s2[0] != s1[-1]:
                continue
            cell = (s1 + s2[1:], rho)
            prod = PolyForm.zero(v1.dims)
            for k in v1.degrees():
                part = v1.homogeneous(k).wedge(v2)
                prod = prod + (part.scale(-1) if k * q % 2 else part)
            out[cell] = out.get(cell, PolyForm.zero(v1.dims)) + prod
    return out
