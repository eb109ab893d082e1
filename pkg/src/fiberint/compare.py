"""Comparing the two pushforwards, and the dependence on the triangulation near the boundary."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .bundle import BundleTriangulation
from .deligne import ClassMismatch, DeligneRep, Report, class_report, pushforward
from .integration import integrate_KL
from .nerve import NerveForm
from .primitive import NoPrimitive, find_primitive


@dataclass(frozen=True)
class RefinementMap:
    """Vertex assignment ``α`` from a triangulation to the cover of a coarser one.

    Here the covers are the vertex star covers of the triangulations
    themselves, so the assignment is the identity and so are ``T`` and ``T′``.
    """

    assignment: Mapping

    @classmethod
    def identity(cls, complex) -> "RefinementMap":
        return cls({v: v for v in complex.vertices})

    def is_identity(self) -> bool:
        return all(k == v for k, v in self.assignment.items())

    def apply(self, form: NerveForm) -> NerveForm:
        if not self.is_identity():
            raise NotImplementedError("only the identity refinement is realised")
        return form


def compare_pushforwards(r: DeligneRep, B: BundleTriangulation, cycles: Sequence[Mapping],
                         T: RefinementMap | None = None, T_prime: RefinementMap | None = None,
                         strict: bool = True) -> Report:
    """``T′∫_{[Y/Z]}`` against ``∫_{K/L}T`` on a representative; equal classes expected."""
    T = T or RefinementMap.identity(B.K)
    T_prime = T_prime or RefinementMap.identity(B.L)
    moved = DeligneRep(r.level, T.apply(r.Lam), r.alpha, T.apply(r.beta))
    comb = pushforward(moved, B, "combinatorial")
    pou = pushforward(r, B, "pou")
    pou = DeligneRep(pou.level, T_prime.apply(pou.Lam), pou.alpha, T_prime.apply(pou.beta))
    rep = class_report(pou, comb, cycles)
    rep.checks["forms identical"] = comb.Lam == pou.Lam and comb.beta == pou.beta
    if strict and not rep.ok:
        raise ClassMismatch("; ".join(rep.failures))
    return rep


def boundary_dependence(omega1: NerveForm, B1: BundleTriangulation, omega2: NerveForm,
                        B2: BundleTriangulation, cycles: Sequence[Mapping] = ()) -> tuple:
    """Integrate over two triangulations agreeing near the boundary and exhibit the
    difference as ``dμ``; returns ``(report, difference, μ)``."""
    if B1.L != B2.L:
        raise ValueError("the two bundles need the same base")
    diff = integrate_KL(omega1, B1) - integrate_KL(omega2, B2)
    rep = Report(True)
    rep.checks["difference closed"] = diff.d().is_zero()
    for k, z in enumerate(cycles):
        rep.checks[f"period {k}"] = str(diagonal_period(diff, z))
    if diff.is_zero():
        rep.checks["primitive"] = "difference vanishes"
        return rep, diff, NerveForm(diff.nerve)
    try:
        mu = find_primitive(diff)
    except NoPrimitive as exc:
        rep.ok = False
        rep.failures.append(str(exc))
        return rep, diff, None
    good = mu.d() == diff and mu.is_compatible()
    rep.checks["primitive"] = "dμ = difference (exact)" if good else "verification failed"
    rep.ok = good
    return rep, diff, mu


def diagonal_period(form: NerveForm, cycle: Mapping) -> Fraction:
    """``∫_z diag^*form`` for a simplicial cycle of the base."""
    from .deligne import _diagonal_value

    total = Fraction(0)
    for rho, c in cycle.items():
        rho = tuple(rho)
        v = form.get((rho, rho))
        if not v.is_zero():
            total += c * _diagonal_value(v, rho).homogeneous(len(rho) - 1).integrate_top()
    return total
