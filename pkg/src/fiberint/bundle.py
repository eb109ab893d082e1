"""Triangulated bundles ``π: K → L`` and their prismatic decomposition."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Mapping, Sequence

from .complexes import Chain, Nerve, SimplicialComplex, boundary_chain, triangulated_nerve
from .polyform import ell_sign


class NonSimplicialMap(ValueError):
    pass


class FiberDimMismatch(ValueError):
    pass


class InconsistentOrientation(ValueError):
    pass


class OrientationMissing(KeyError):
    pass


@dataclass(frozen=True, order=True)
class PrismaticSimplex:
    """A K-simplex viewed as ``[B_0 | … | B_p]`` over the base ``η = [a_0 … a_p]``."""

    base: tuple
    blocks: tuple

    @property
    def p(self) -> int:
        return len(self.base) - 1

    @property
    def qs(self) -> tuple:
        return tuple(len(b) - 1 for b in self.blocks)

    @property
    def fdim(self) -> int:
        return sum(self.qs)

    @property
    def simplex(self) -> tuple:
        return tuple(v for b in self.blocks for v in b)

    @property
    def dims(self) -> tuple:
        """Block dimensions of the prism ``Δ^p × Δ^{q_0} × … × Δ^{q_p}``."""
        return (self.p, *self.qs)

    def __repr__(self):
        return "[" + " | ".join(" ".join(map(str, b)) for b in self.blocks) + "]"


def ell_point(t: Sequence, blocks: Sequence[Sequence]) -> tuple:
    """The prismatic map ``(t, s^0, …, s^p) ↦ (t_0 s^0, …, t_p s^p)`` on points."""
    if len(t) != len(blocks):
        raise ValueError("one block of fiber coordinates per base coordinate")
    return tuple(Fraction(ti) * Fraction(x) for ti, s in zip(t, blocks) for x in s)


class BundleTriangulation:
    """A simplicial surjection with fibers of dimension ``fiber_dim``.

    ``orientation`` assigns to each top simplex of K its sign relative to the
    local product orientation ``[fiber] × [η]``, where the base simplex η is
    ordered increasingly.  Vertices of K are reordered so that the vertices
    over each L-vertex are consecutive and blocks follow base order.
    """

    def __init__(self, K: SimplicialComplex, L: SimplicialComplex, vmap: Mapping, fiber_dim: int,
                 orientation: Mapping | None = None):
        order = sorted(K.vertices, key=lambda v: (L.pos[vmap[v]], K.pos[v]))
        self.K = SimplicialComplex(order, K.maximal())
        self.L = L
        self.vmap = dict(vmap)
        self.n = fiber_dim
        self._orientation = {}
        for s, sign in (orientation or {}).items():
            # a permuted tuple carries its permutation sign
            perm, c = self.K.canonical(s)
            self._orientation[c] = sign * perm

    # -- projection -----------------------------------------------------
    def image(self, rho) -> tuple:
        return self.L.canonical(tuple(dict.fromkeys(self.vmap[v] for v in rho)))[1]

    def prismatic(self, rho) -> PrismaticSimplex:
        rho = self.K.canonical(rho)[1]
        blocks: list = []
        base: list = []
        for v in rho:
            a = self.vmap[v]
            if base and base[-1] == a:
                blocks[-1].append(v)
            else:
                base.append(a)
                blocks.append([v])
        return PrismaticSimplex(tuple(base), tuple(tuple(b) for b in blocks))

    @cached_property
    def _over(self) -> dict:
        out: dict = {}
        for rho in self.K:
            out.setdefault(self.image(rho), []).append(rho)
        return out

    def over(self, eta) -> list:
        return list(self._over.get(tuple(eta), ()))

    def enumerate_prismatic(self, eta, fdim: int) -> list:
        eta = self.L.require(eta)
        return [self.prismatic(r) for r in self.over(eta) if len(r) - len(eta) == fdim]

    def top_prismatic(self, eta) -> list:
        return self.enumerate_prismatic(eta, self.n)

    def preimage(self, sub: SimplicialComplex) -> SimplicialComplex:
        keep = []
        for r in self.K:
            if self.image(r) in sub:
                keep.append(r)
        used = {v for r in keep for v in r}
        return SimplicialComplex([v for v in self.K.vertices if v in used], keep)

    def fiber(self, a) -> SimplicialComplex:
        return self.preimage(self.L.subcomplex([(a,)]))

    # -- orientation ------------------------------------------------------
    def orientation(self, rho) -> int:
        try:
            return self._orientation[tuple(rho)]
        except KeyError:
            raise OrientationMissing(f"no orientation for top simplex {rho!r}") from None

    def epsilon(self, tau: PrismaticSimplex) -> int:
        """Sign of a top prismatic simplex in the fundamental class over its base."""
        return self.orientation(tau.simplex)

    def product_sign(self, tau: PrismaticSimplex) -> int:
        """Sign of ``tau`` relative to the blockwise product orientation of its fiber."""
        return self.orientation(tau.simplex) * ell_sign([q + 1 for q in tau.qs])

    def fundamental_class(self, eta) -> Chain:
        return Chain({tau: self.epsilon(tau) for tau in self.top_prismatic(eta)})

    def top_simplices(self) -> list:
        return [r for r in self.K if len(r) - len(self.image(r)) == self.n and
                self.image(r) in self.L.maximal()]

    def has_boundary(self) -> bool:
        """True when some fiber has nonempty boundary."""
        for eta in self.L.maximal():
            if boundary_F(self.fundamental_class(eta)):
                return True
        return False

    # -- nerves -----------------------------------------------------------
    @cached_property
    def NL(self) -> Nerve:
        return triangulated_nerve(self.L)

    @cached_property
    def NK(self) -> Nerve:
        """The triangulated nerve of K."""
        return triangulated_nerve(self.K)

    @cached_property
    def NW(self) -> Nerve:
        """Cells ``(σ, ρ)`` with ``σ ∈ L`` and ``ρ ∈ π^{-1}(L_σ)``: the nerve of the pulled-back cover."""
        cache: dict = {}

        def star(sigma):
            if sigma not in cache:
                cache[sigma] = self.preimage(self.L.closed_star(sigma))
            return cache[sigma]

        return Nerve(self.L, self.K, star, "NW")

    @cached_property
    def PN(self) -> Nerve:
        """Prismatic nerve: cells ``(τ, ρ)`` with ``τ`` a prismatic simplex and ``ρ ∈ K_τ``."""
        return Nerve(PrismaticIndex(self), self.K, lambda tau: self.K.closed_star(tau.simplex), "PN")


class PrismaticIndex:
    """The prismatic simplices of a bundle, graded by total dimension, as a nerve index."""

    def __init__(self, B: "BundleTriangulation"):
        self.B = B
        self._all = sorted((B.prismatic(r) for r in B.K), key=lambda t: (len(t.simplex), B.K.key(t.simplex)))

    @property
    def dim(self) -> int:
        return self.B.K.dim

    def simplices(self, k: int) -> list:
        return [t for t in self._all if len(t.simplex) - 1 == k]

    def of_type(self, p: int, qs: tuple | None = None) -> list:
        return [t for t in self._all if t.p == p and (qs is None or t.qs == tuple(qs))]

    def __iter__(self):
        return iter(self._all)

    def __contains__(self, tau) -> bool:
        return isinstance(tau, PrismaticSimplex) and tau.simplex in self.B.K and self.B.prismatic(tau.simplex) == tau


def validate_bundle(K: SimplicialComplex, L: SimplicialComplex, vmap: Mapping, fiber_dim: int,
                    orientation: Mapping | None) -> BundleTriangulation:
    missing = [v for v in K.vertices if v not in vmap]
    if missing:
        raise NonSimplicialMap(f"vertex map undefined on {missing}")
    for v in K.vertices:
        if vmap[v] not in L.pos:
            raise NonSimplicialMap(f"vertex {v!r} maps to unknown vertex {vmap[v]!r}")
    B = BundleTriangulation(K, L, vmap, fiber_dim, orientation)
    for rho in B.K:
        img = tuple(dict.fromkeys(vmap[v] for v in rho))
        _, c = L.canonical(img)
        if c not in L:
            raise NonSimplicialMap(f"{rho!r} maps onto {c!r}, which is not in L")
    for a in L.vertices:
        if not B.over((a,)):
            raise NonSimplicialMap(f"vertex {a!r} of L is not hit")
    for rho in B.K:
        fd = len(rho) - len(B.image(rho))
        if fd > fiber_dim:
            raise FiberDimMismatch(f"{rho!r} has fiber dimension {fd} > {fiber_dim}")
    for rho in B.K.maximal():
        fd = len(rho) - len(B.image(rho))
        if fd != fiber_dim or B.image(rho) not in L.maximal():
            raise FiberDimMismatch(f"maximal simplex {rho!r} is not a top prism of fiber dimension {fiber_dim}")
    for eta in L.maximal():
        if not B.over(eta):
            raise FiberDimMismatch(f"nothing over top simplex {eta!r}")
    check_orientation(B)
    return B


def check_orientation(B: BundleTriangulation) -> None:
    """Validate the orientation data; raises :class:`InconsistentOrientation`."""
    for r in B.top_simplices():
        if r not in B._orientation:
            raise InconsistentOrientation(f"missing orientation for {r!r}")
        if B._orientation[r] not in (1, -1):
            raise InconsistentOrientation(f"orientation of {r!r} must be ±1")
    extra = set(B._orientation) - set(B.top_simplices())
    if extra:
        raise InconsistentOrientation(f"orientation given for non-top simplices {sorted(extra)}")
    # within each top η: ∂ of the oriented sum lives over ∂η or on the fiber boundary
    for eta in B.L.maximal():
        tops = [r for r in B.over(eta) if len(r) - len(eta) == B.n]
        total = Chain({r: B._orientation[r] for r in tops})
        incidence: dict = {}
        for r in tops:
            for j in range(len(r)):
                f = r[:j] + r[j + 1:]
                incidence[f] = incidence.get(f, 0) + 1
        for f, c in boundary_chain(total).items():
            if B.image(f) == eta and incidence.get(f, 0) > 1:
                raise InconsistentOrientation(f"interior face {f!r} over {eta!r} has multiplicity {c}")
    # the fiber orientation over each vertex must not depend on the top simplex used
    seen: dict = {}
    for eta in B.L.maximal():
        for tau in B.top_prismatic(eta):
            for i, q in enumerate(tau.qs):
                if q == B.n:
                    key = tau.blocks[i]
                    s = B.product_sign(tau)
                    if seen.setdefault(key, (s, eta))[0] != s:
                        raise InconsistentOrientation(
                            f"fiber simplex {key!r} oriented differently over {seen[key][1]!r} and {eta!r}")


def suggest_orientation(K: SimplicialComplex, L: SimplicialComplex, vmap: Mapping, fiber_dim: int) -> dict:
    """Propagate a fiber orientation by breadth-first search.

    Returns a mapping top simplex → sign; validation still decides whether the
    fibers are orientable.
    """
    B = BundleTriangulation(K, L, vmap, fiber_dim)
    n = fiber_dim
    # orient each vertex fiber coherently
    delta: dict = {}
    for a in L.vertices:
        F = B.fiber(a)
        tops = F.simplices(n)
        faces: dict = {}
        for r in tops:
            for j in range(len(r)):
                faces.setdefault(r[:j] + r[j + 1:], []).append((r, j))
        for start in tops:
            if start in delta:
                continue
            delta[start] = 1
            queue = deque([start])
            while queue:
                r = queue.popleft()
                for j in range(len(r)):
                    for (r2, j2) in faces[r[:j] + r[j + 1:]]:
                        if r2 != r and r2 not in delta:
                            delta[r2] = -delta[r] * (-1) ** (j + j2)
                            queue.append(r2)
    out: dict = {}
    for eta in L.maximal():
        tops = [r for r in B.over(eta) if len(r) - len(eta) == n]
        faces = {}
        for r in tops:
            for j in range(len(r)):
                f = r[:j] + r[j + 1:]
                if B.image(f) == eta:
                    faces.setdefault(f, []).append((r, j))
        sign: dict = {}
        queue = deque()
        for r in tops:
            tau = B.prismatic(r)
            for i, q in enumerate(tau.qs):
                if q == n and r not in sign:
                    sign[r] = delta[tau.blocks[i]] * ell_sign([x + 1 for x in tau.qs])
                    queue.append(r)
        while queue:
            r = queue.popleft()
            for j in range(len(r)):
                f = r[:j] + r[j + 1:]
                for (r2, j2) in faces.get(f, ()):
                    if r2 != r and r2 not in sign:
                        sign[r2] = -sign[r] * (-1) ** (j + j2)
                        queue.append(r2)
        for r in tops:
            out[r] = sign.get(r, 1)
    return out


# -- prismatic chains ---------------------------------------------------------


def _drop(tau: PrismaticSimplex, i: int, j: int) -> PrismaticSimplex:
    blocks = list(tau.blocks)
    blocks[i] = blocks[i][:j] + blocks[i][j + 1:]
    return PrismaticSimplex(tau.base, tuple(blocks))


def boundary_F(c: Chain) -> Chain:
    out = Chain()
    for tau, coef in c.items():
        Q = 0
        for i, q in enumerate(tau.qs):
            if q > 0:
                sign = -1 if (Q + i) % 2 else 1
                for j in range(q + 1):
                    out.add(_drop(tau, i, j), coef * sign * (-1 if j % 2 else 1))
            Q += q
    return out


def boundary_H(c: Chain) -> Chain:
    out = Chain()
    for tau, coef in c.items():
        if tau.p == 0:
            continue
        Q = 0
        for i, q in enumerate(tau.qs):
            if q == 0:
                sign = -1 if (Q + i) % 2 else 1
                base = tau.base[:i] + tau.base[i + 1:]
                blocks = tau.blocks[:i] + tau.blocks[i + 1:]
                out.add(PrismaticSimplex(base, blocks), coef * sign)
            Q += q
    return out


def fiber_restriction(tau: PrismaticSimplex, face) -> PrismaticSimplex | None:
    """Sub-prism of ``tau`` over a face of its base (``None`` if the face is not a face)."""
    face = tuple(face)
    if not set(face) <= set(tau.base):
        return None
    keep = [i for i, a in enumerate(tau.base) if a in face]
    return PrismaticSimplex(tuple(tau.base[i] for i in keep), tuple(tau.blocks[i] for i in keep))


def all_prismatic(B: BundleTriangulation) -> list:
    return [B.prismatic(r) for r in B.K]


def chain_to_simplicial(c: Chain) -> Chain:
    """Block concatenation: prismatic chains as ordinary chains of K."""
    out = Chain()
    for tau, coef in c.items():
        out.add(tau.simplex, coef)
    return out
