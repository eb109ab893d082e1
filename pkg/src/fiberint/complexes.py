"""Finite ordered simplicial complexes, integer chains, stars and nerves."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Callable, Hashable, Iterable, Sequence


class DegenerateSimplex(ValueError):
    pass


class UnknownSimplex(KeyError):
    pass


Simplex = tuple


def permutation_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (entries assumed distinct)."""
    n = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                n += 1
    return -1 if n & 1 else 1


class SimplicialComplex:
    """Face-closed set of increasing vertex tuples over a totally ordered vertex list."""

    def __init__(self, vertices: Sequence[Hashable], simplices: Iterable[Sequence] = ()):
        self.vertices = tuple(vertices)
        self.pos = {v: i for i, v in enumerate(self.vertices)}
        if len(self.pos) != len(self.vertices):
            raise ValueError("duplicate vertex identifiers")
        cells: set = {(v,) for v in self.vertices}
        for s in simplices:
            _, c = self.canonical(s)
            for k in range(1, len(c) + 1):
                cells.update(combinations(c, k))
        self._cells = frozenset(cells)
        by_dim: dict = {}
        for c in cells:
            by_dim.setdefault(len(c) - 1, []).append(c)
        self._by_dim = {k: sorted(v, key=self.key) for k, v in by_dim.items()}
        self._star_cache: dict = {}

    # -- basics -----------------------------------------------------------
    def key(self, s: Sequence):
        return tuple(self.pos[v] for v in s)

    def canonical(self, s: Sequence) -> tuple[int, Simplex]:
        """Sort ``s`` into vertex order; returns ``(sign, sorted tuple)``."""
        s = tuple(s)
        for v in s:
            if v not in self.pos:
                raise UnknownSimplex(f"unknown vertex {v!r}")
        if len(set(s)) != len(s):
            raise DegenerateSimplex(f"repeated vertex in {s!r}")
        keys = [self.pos[v] for v in s]
        order = sorted(range(len(s)), key=keys.__getitem__)
        return permutation_sign(keys), tuple(s[i] for i in order)

    def __contains__(self, s) -> bool:
        return tuple(s) in self._cells

    def __iter__(self):
        for k in sorted(self._by_dim):
            yield from self._by_dim[k]

    def __len__(self):
        return len(self._cells)

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.vertices == other.vertices and self._cells == other._cells

    def __hash__(self):
        return hash((self.vertices, self._cells))

    def __repr__(self):
        counts = [len(self.simplices(k)) for k in range(self.dim + 1)]
        return f"SimplicialComplex(f-vector={counts})"

    @property
    def dim(self) -> int:
        return max(self._by_dim, default=-1)

    def simplices(self, k: int) -> list:
        return list(self._by_dim.get(k, ()))

    def require(self, s) -> Simplex:
        s = tuple(s)
        if s not in self._cells:
            raise UnknownSimplex(f"{s!r} is not a simplex of the complex")
        return s

    def maximal(self) -> list:
        """Simplices that are not a proper face of another simplex."""
        out = []
        for s in self:
            if not any(len(t) == len(s) + 1 and set(s) < set(t) for t in self._by_dim.get(len(s), ())):
                out.append(s)
        return out

    def cofaces(self, s) -> list:
        ss = set(s)
        return [t for t in self if ss <= set(t)]

    def closed_star(self, s) -> "SimplicialComplex":
        s = self.require(s)
        if s not in self._star_cache:
            tops = [t for t in self.maximal() if set(s) <= set(t)]
            self._star_cache[s] = SimplicialComplex(
                [v for v in self.vertices if any(v in t for t in tops)], tops
            )
        return self._star_cache[s]

    def subcomplex(self, generators: Iterable[Sequence]) -> "SimplicialComplex":
        gens = [self.require(self.canonical(g)[1]) for g in generators]
        used = {v for g in gens for v in g}
        return SimplicialComplex([v for v in self.vertices if v in used], gens)

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self._cells <= other._cells


def build_complex(generators: Iterable[Sequence], vertices: Sequence | None = None) -> SimplicialComplex:
    gens = [tuple(g) for g in generators]
    for g in gens:
        if len(set(g)) != len(g):
            raise DegenerateSimplex(f"repeated vertex in {g!r}")
    if vertices is None:
        seen = []
        for g in gens:
            for v in g:
                if v not in seen:
                    seen.append(v)
        try:
            vertices = sorted(seen)
        except TypeError:
            vertices = seen
    return SimplicialComplex(vertices, gens)


# -- chains ---------------------------------------------------------------


class Chain(dict):
    """Finitely supported map ``simplex -> coefficient``; zero entries are dropped."""

    def __init__(self, items=None):
        super().__init__()
        if items:
            for k, v in dict(items).items():
                self.add(k, v)

    def add(self, s, c):
        if not c:
            return
        v = self.get(s, 0) + c
        if v:
            self[s] = v
        else:
            self.pop(s, None)

    def __add__(self, other):
        out = Chain(self)
        for k, v in other.items():
            out.add(k, v)
        return out

    def __neg__(self):
        return Chain({k: -v for k, v in self.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Chain({k: v * c for k, v in self.items()}) if c else Chain()

    __rmul__ = scale


def boundary_chain(c: Chain) -> Chain:
    out = Chain()
    for s, coef in c.items():
        if len(s) == 1:
            continue
        for j in range(len(s)):
            out.add(s[:j] + s[j + 1:], coef if j % 2 == 0 else -coef)
    return out


def boundary_matrix(K: SimplicialComplex, k: int):
    """Dense integer matrix of ``∂: C_k -> C_{k-1}`` in the complex's simplex order."""
    rows = {s: i for i, s in enumerate(K.simplices(k - 1))}
    cols = K.simplices(k)
    mat = [[0] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        for f, c in boundary_chain(Chain({s: 1})).items():
            mat[rows[f]][j] += c
    return mat


# -- nerves -------------------------------------------------------------------


@dataclass(frozen=True)
class Nerve:
    """A nerve whose ``p``-cells are ``(σ, η)`` with ``σ`` a ``p``-simplex of the index
    complex and ``η`` a simplex of ``star(σ)`` in the space complex.

    ``star`` must shrink along inclusions: ``σ ⊆ σ'`` implies ``star(σ') ⊆ star(σ)``,
    which makes every face map an inclusion ``(σ, η) ↦ (d_jσ, η)``.
    """

    index: SimplicialComplex
    space: SimplicialComplex
    star: Callable = field(compare=False)
    name: str = "nerve"

    def stars(self, sigma) -> SimplicialComplex:
        return self.star(sigma)

    def cells(self, p: int | None = None) -> list:
        dims = range(self.index.dim + 1) if p is None else [p]
        out = []
        for k in dims:
            for s in self.index.simplices(k):
                out.extend((s, eta) for eta in self.star(s))
        return out

    def top_cells(self, p: int) -> list:
        return [(s, eta) for s in self.index.simplices(p) for eta in self.star(s).maximal()]

    def components(self, p: int) -> dict:
        return {s: self.star(s) for s in self.index.simplices(p)}

    def __contains__(self, cell) -> bool:
        s, eta = cell
        return s in self.index and eta in self.star(s)

    @staticmethod
    def face(cell, j: int):
        s, eta = cell
        return s[:j] + s[j + 1:], eta

    @staticmethod
    def degeneracy(cell, j: int):
        s, eta = cell
        return s[: j + 1] + s[j:], eta

    @property
    def dim(self) -> int:
        return self.index.dim


def triangulated_nerve(L: SimplicialComplex) -> Nerve:
    return Nerve(L, L, L.closed_star, "NL")


# -- subdivision --------------------------------------------------------------


@dataclass(frozen=True)
class Subdivision:
    """A subdivision with carriers (smallest original simplex containing each new vertex)."""

    complex: SimplicialComplex
    carrier: dict
    alpha: dict
    base: SimplicialComplex

    def alpha_violations(self) -> list:
        """New vertices whose closed star is not inside the open star of ``alpha``.

        A point of the subdivision lies in the open star of ``a`` iff its carrier
        contains ``a``; carriers grow on open faces, so checking the vertices of
        each closed star suffices.
        """
        bad = []
        Ls = self.complex
        for v in Ls.vertices:
            a = self.alpha[v]
            star = Ls.closed_star((v,))
            for w in star.vertices:
                if a not in self.carrier[w]:
                    bad.append((v, w))
        return bad


def barycentric_subdivision(L: SimplicialComplex | Subdivision, alpha: str = "max") -> Subdivision:
    """Barycentric subdivision; new vertices are the simplices of the input.

    ``alpha="max"`` sends a barycenter to the largest vertex of its carrier.
    ``alpha="common"`` picks the largest vertex shared by the carriers of all
    vertices of the subdivided simplex, falling back to ``"max"`` when none is
    shared; on a second subdivision this satisfies the closed-star containment.
    """
    if isinstance(L, Subdivision):
        prev, base, prev_carrier = L.complex, L.base, L.carrier
    else:
        prev, base, prev_carrier = L, L, {v: (v,) for v in L.vertices}
    verts = list(prev)
    full = []
    for top in prev.maximal():
        for order in permutations(top):
            full.append(tuple(prev.canonical(order[: k + 1])[1] for k in range(len(order))))
    Ls = SimplicialComplex(verts, full)
    carrier = {}
    for s in verts:
        c = set()
        for v in s:
            c.update(prev_carrier[v])
        carrier[s] = base.canonical(tuple(c))[1]
    amap = {}
    for s in verts:
        choice = None
        if alpha == "common":
            common = set.intersection(*(set(prev_carrier[v]) for v in s))
            if common:
                choice = max(common, key=base.pos.__getitem__)
        if choice is None:
            choice = max(carrier[s], key=base.pos.__getitem__)
        amap[s] = choice
    return Subdivision(Ls, carrier, amap, base)
