"""Exact polynomial differential forms on products of simplices.

A :class:`PolyForm` lives on ``Δ^{q_0} × … × Δ^{q_r}``.  Block ``b`` has
barycentric coordinates ``t^b_0, …, t^b_{q_b}``; the first one is eliminated
through ``t^b_0 = 1 - Σ_{j≥1} t^b_j`` so only ``t^b_1 … t^b_{q_b}`` are stored
variables.  With that choice ``dt_1 ∧ … ∧ dt_q`` is the standard orientation
of each simplex and the product is oriented block by block.

Optionally a form carries ``nparams`` free parameters appended after the
simplex variables.  They behave as constants under ``d``.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .kernels import d_terms, wedge_terms


class BlockMismatch(ValueError):
    pass


class NotTopDegree(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def dirichlet(exps: Sequence[int]) -> Fraction:
    """``∫_{Δ^q} t_1^{a_1}⋯t_q^{a_q} dt_1⋯dt_q`` for ``q = len(exps)``."""
    num = 1
    for a in exps:
        num *= factorial(a)
    return Fraction(num, factorial(sum(exps) + len(exps)))


def _inversions(seq) -> int:
    n = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                n += 1
    return n


class PolyForm:
    __slots__ = ("dims", "nparams", "terms", "offsets")

    def __init__(self, dims: Sequence[int], terms: dict | None = None, nparams: int = 0):
        self.dims = tuple(dims)
        self.nparams = nparams
        offs = []
        acc = 0
        for q in self.dims:
            offs.append(acc)
            acc += q
        self.offsets = tuple(offs)
        if terms is None:
            self.terms = {}
        else:
            self.terms = {k: v for k, v in terms.items() if v}

    # -- construction -----------------------------------------------------
    @property
    def nvars(self) -> int:
        return sum(self.dims)

    @classmethod
    def zero(cls, dims, nparams=0):
        return cls(dims, {}, nparams)

    @classmethod
    def constant(cls, dims, c, nparams=0):
        n = sum(dims) + nparams
        return cls(dims, {((0,) * n, ()): _frac(c)}, nparams)

    @classmethod
    def coord(cls, dims, block, j, nparams=0):
        """Barycentric coordinate ``t^block_j`` (``j = 0`` is the eliminated one)."""
        dims = tuple(dims)
        n = sum(dims) + nparams
        off = sum(dims[:block])
        q = dims[block]
        if not 0 <= j <= q:
            raise IndexError(f"coordinate {j} out of range for Δ^{q}")
        if j == 0:
            terms = {((0,) * n, ()): Fraction(1)}
            for k in range(q):
                e = [0] * n
                e[off + k] = 1
                terms[(tuple(e), ())] = Fraction(-1)
            return cls(dims, terms, nparams)
        e = [0] * n
        e[off + j - 1] = 1
        return cls(dims, {(tuple(e), ()): Fraction(1)}, nparams)

    @classmethod
    def param(cls, dims, k, nparams):
        n = sum(dims) + nparams
        e = [0] * n
        e[sum(dims) + k] = 1
        return cls(dims, {(tuple(e), ()): Fraction(1)}, nparams)

    def bary(self, block):
        return [PolyForm.coord(self.dims, block, j, self.nparams) for j in range(self.dims[block] + 1)]

    # -- algebra ----------------------------------------------------------
    def _check(self, other):
        if self.dims != other.dims or self.nparams != other.nparams:
            raise BlockMismatch(f"{self.dims}/{self.nparams} vs {other.dims}/{other.nparams}")

    def __add__(self, other):
        if not isinstance(other, PolyForm):
            if other == 0:
                return self
            other = PolyForm.constant(self.dims, other, self.nparams)
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return PolyForm(self.dims, out, self.nparams)

    __radd__ = __add__

    def __neg__(self):
        return PolyForm(self.dims, {k: -v for k, v in self.terms.items()}, self.nparams)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _frac(c)
        if not c:
            return PolyForm.zero(self.dims, self.nparams)
        return PolyForm(self.dims, {k: v * c for k, v in self.terms.items()}, self.nparams)

    def __mul__(self, other):
        if isinstance(other, PolyForm):
            return self.wedge(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def wedge(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        return PolyForm(self.dims, wedge_terms(self.terms, other.terms), self.nparams)

    __xor__ = wedge

    def d(self) -> "PolyForm":
        return PolyForm(self.dims, d_terms(self.terms, self.nvars), self.nparams)

    def __pow__(self, k: int):
        out = PolyForm.constant(self.dims, 1, self.nparams)
        for _ in range(k):
            out = out.wedge(self)
        return out

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, PolyForm):
            return self.dims == other.dims and self.nparams == other.nparams and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {len(d) for (_, d) in self.terms}

    def poly_degree(self) -> int:
        return max((sum(e) for (e, _) in self.terms), default=0)

    def homogeneous(self, k: int) -> "PolyForm":
        return PolyForm(self.dims, {key: v for key, v in self.terms.items() if len(key[1]) == k}, self.nparams)

    def block_degree(self, block: int, k: int) -> "PolyForm":
        """Part of differential degree ``k`` in the variables of ``block``."""
        lo = self.offsets[block]
        hi = lo + self.dims[block]
        keep = {}
        for key, v in self.terms.items():
            if sum(1 for x in key[1] if lo <= x < hi) == k:
                keep[key] = v
        return PolyForm(self.dims, keep, self.nparams)

    def is_constant_in(self, blocks: Iterable[int]) -> bool:
        """No dependence on, and no differential of, the variables of ``blocks``."""
        idx = set()
        for b in blocks:
            idx.update(range(self.offsets[b], self.offsets[b] + self.dims[b]))
        for (e, d) in self.terms:
            if any(e[i] for i in idx) or any(x in idx for x in d):
                return False
        return True

    # -- maps ---------------------------------------------------------------
    def pullback(self, source_dims, images: Sequence["PolyForm"], source_nparams: int = 0) -> "PolyForm":
        """Substitute ``images[v]`` (0-forms on the source) for variable ``v``.

        ``images`` covers the simplex variables followed by the parameters.
        """
        source_dims = tuple(source_dims)
        n = self.nvars + self.nparams
        if len(images) != n:
            raise BlockMismatch(f"expected {n} images, got {len(images)}")
        for im in images:
            if im.dims != source_dims or im.nparams != source_nparams:
                raise BlockMismatch("image lives on the wrong blocks")
        one = PolyForm.constant(source_dims, 1, source_nparams).terms
        powers: list[list[dict]] = [[one] for _ in range(n)]
        dimages: list[dict | None] = [None] * n

        def power(v, k):
            lst = powers[v]
            while len(lst) <= k:
                lst.append(wedge_terms(lst[-1], images[v].terms))
            return lst[k]

        out: dict = {}
        for (e, d), c in self.terms.items():
            acc = one
            for v, k in enumerate(e):
                if k:
                    acc = wedge_terms(acc, power(v, k))
                    if not acc:
                        break
            for v in d:
                if not acc:
                    break
                if dimages[v] is None:
                    dimages[v] = images[v].d().terms
                acc = wedge_terms(acc, dimages[v])
            for key, val in acc.items():
                s = out.get(key, 0) + c * val
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return PolyForm(source_dims, out, source_nparams)

    def embed(self, new_dims, block_map: Sequence[int]) -> "PolyForm":
        """Regard the form as living on ``new_dims``; block ``b`` goes to ``block_map[b]``."""
        new_dims = tuple(new_dims)
        new_offs = [sum(new_dims[:b]) for b in range(len(new_dims))]
        vmap = []
        for b, q in enumerate(self.dims):
            if new_dims[block_map[b]] != q:
                raise BlockMismatch("embedded block has the wrong dimension")
            vmap.extend(new_offs[block_map[b]] + k for k in range(q))
        nv = sum(new_dims)
        pstart = nv
        out = {}
        for (e, d), c in self.terms.items():
            ee = [0] * (nv + self.nparams)
            for v, k in enumerate(e[: self.nvars]):
                ee[vmap[v]] = k
            for k in range(self.nparams):
                ee[pstart + k] = e[self.nvars + k]
            dd = [vmap[v] for v in d]
            sign = -1 if _inversions(dd) & 1 else 1
            out[(tuple(ee), tuple(sorted(dd)))] = c * sign
        return PolyForm(new_dims, out, self.nparams)

    def integrate_blocks(self, blocks: Sequence[int], sign: int = 1) -> "PolyForm":
        """Integrate out ``blocks`` (fiber-first convention).

        The fiber is the product of ``blocks`` in the listed order; each term
        is rewritten as ``(fiber volume) ∧ (rest)`` before integrating.  Terms
        without the full fiber differential contribute nothing.
        """
        blocks = list(blocks)
        fiber_vars = []
        for b in blocks:
            fiber_vars.extend(range(self.offsets[b], self.offsets[b] + self.dims[b]))
        fset = set(fiber_vars)
        keep_blocks = [b for b in range(len(self.dims)) if b not in blocks]
        new_dims = tuple(self.dims[b] for b in keep_blocks)
        remap = {}
        k = 0
        for b in keep_blocks:
            for v in range(self.offsets[b], self.offsets[b] + self.dims[b]):
                remap[v] = k
                k += 1
        nv = self.nvars
        out: dict = {}
        cache: dict = {}
        for (e, d), c in self.terms.items():
            if not fset.issubset(d):
                continue
            rest = [v for v in d if v not in fset]
            s = -1 if _inversions(fiber_vars + rest) & 1 else 1
            fe = tuple(e[v] for v in fiber_vars)
            val = cache.get(fe)
            if val is None:
                val = Fraction(1)
                pos = 0
                for b in blocks:
                    q = self.dims[b]
                    val *= dirichlet(fe[pos:pos + q])
                    pos += q
                cache[fe] = val
            ee = tuple(e[v] for v in range(nv) if v not in fset) + tuple(e[nv:])
            key = (ee, tuple(remap[v] for v in rest))
            tot = out.get(key, 0) + c * val * s * sign
            if tot:
                out[key] = tot
            else:
                out.pop(key, None)
        return PolyForm(new_dims, out, self.nparams)

    def integrate_top(self) -> Fraction:
        top = self.homogeneous(self.nvars)
        if self.terms and not top.terms and self.nvars:
            if all(len(d) != self.nvars for (_, d) in self.terms):
                raise NotTopDegree(f"form has degrees {sorted(self.degrees())}, need {self.nvars}")
        res = top.integrate_blocks(range(len(self.dims)))
        if self.nparams and any(any(e) for (e, _) in res.terms):
            raise ValueError("result still depends on parameters")
        return sum(res.terms.values(), Fraction(0))

    def scalar(self) -> Fraction:
        """Value of a form with no variables left (all blocks zero-dimensional)."""
        if any(any(e) or d for (e, d) in self.terms):
            raise ValueError("form is not a constant")
        return sum(self.terms.values(), Fraction(0))

    # -- numerics -----------------------------------------------------------
    def evaluate(self, point: Sequence[float], params: Sequence[float] = ()) -> dict:
        """Numeric coefficients ``{differentials: value}`` at reduced coordinates ``point``."""
        vals = list(point) + list(params)
        out: dict = {}
        for (e, d), c in self.terms.items():
            m = float(c)
            for v, k in enumerate(e):
                if k:
                    m *= vals[v] ** k
            out[d] = out.get(d, 0.0) + m
        return out

    # -- display ----------------------------------------------------------
    def var_name(self, v: int) -> str:
        if v >= self.nvars:
            return f"p{v - self.nvars}"
        for b in range(len(self.dims) - 1, -1, -1):
            if v >= self.offsets[b]:
                j = v - self.offsets[b] + 1
                return f"t{j}" if len(self.dims) == 1 else f"t{b}_{j}"
        raise IndexError(v)

    def __repr__(self):
        if not self.terms:
            return f"PolyForm({self.dims}, 0)"
        parts = []
        for (e, d), c in sorted(self.terms.items()):
            mono = "*".join(
                self.var_name(v) + (f"^{k}" if k > 1 else "") for v, k in enumerate(e) if k
            )
            diff = "^".join("d" + self.var_name(v) for v in d)
            parts.append(f"({c})" + (f" {mono}" if mono else "") + (f" {diff}" if diff else ""))
        return f"PolyForm({self.dims}: " + " + ".join(parts) + ")"


# -- images of common maps ----------------------------------------------------


def images_from_bary(target_dims, full_coords: Sequence[Sequence[PolyForm]], params: Sequence[PolyForm] = ()):
    """Flatten per-block barycentric images into the list ``pullback`` wants."""
    out = []
    for b, q in enumerate(target_dims):
        coords = full_coords[b]
        if len(coords) != q + 1:
            raise BlockMismatch(f"block {b}: need {q + 1} coordinates, got {len(coords)}")
        out.extend(coords[1:])
    out.extend(params)
    return out


def vertex_map_coords(source: PolyForm | tuple, source_block: int, vertex_map: Sequence[int], target_dim: int, nparams: int = 0):
    """Full barycentric images of the simplicial map sending vertex ``i`` to ``vertex_map[i]``."""
    dims = source.dims if isinstance(source, PolyForm) else tuple(source)
    src = [PolyForm.coord(dims, source_block, i, nparams) for i in range(dims[source_block] + 1)]
    out = [PolyForm.zero(dims, nparams) for _ in range(target_dim + 1)]
    for i, j in enumerate(vertex_map):
        out[j] = out[j] + src[i]
    return out


def identity_coords(dims, block, nparams=0):
    return [PolyForm.coord(dims, block, j, nparams) for j in range(dims[block] + 1)]


def ell_coords(dims, base_block: int, fiber_blocks: Sequence[int], nparams: int = 0):
    """Full coordinates of the prismatic map ``(t, s^0..s^p) ↦ (t_0 s^0, …, t_p s^p)``."""
    t = identity_coords(dims, base_block, nparams)
    out = []
    for i, fb in enumerate(fiber_blocks):
        s = identity_coords(dims, fb, nparams)
        out.extend(t[i] * sj for sj in s)
    return out


def simplex_volume(q: int) -> PolyForm:
    """``dt_1 ∧ … ∧ dt_q`` on ``Δ^q``."""
    return PolyForm((q,), {((0,) * q, tuple(range(q))): Fraction(1)})


_ELL_SIGN: dict = {}


def ell_sign(group_sizes: Sequence[int]) -> int:
    """Orientation sign ``g`` with ``[Δ^N] = g·[Π Δ^{g_i-1}] × [Δ^{G-1}]`` under ℓ.

    The fiber (product of the group simplices) comes first.
    """
    key = tuple(group_sizes)
    if key in _ELL_SIGN:
        return _ELL_SIGN[key]
    G = len(key)
    fdims = [g - 1 for g in key]
    N = sum(key) - 1
    src_dims = (G - 1, *fdims)
    full = ell_coords(src_dims, 0, range(1, G + 1))
    vol = simplex_volume(N)
    pulled = vol.pullback(src_dims, images_from_bary((N,), [full]))
    v = pulled.integrate_top()
    if v == 0:
        raise ValueError("degenerate prismatic map")
    s = 1 if v > 0 else -1
    f = sum(fdims)
    # pulled back volume is oriented [base][fibers]; move the base past the fiber
    if (G - 1) * f % 2:
        s = -s
    _ELL_SIGN[key] = s
    return s


def groupsum_pushforward(form: PolyForm, block: int, group_sizes: Sequence[int]) -> PolyForm:
    """Integrate along the fibers of the coordinate-group-sum map on one block.

    ``Δ^N → Δ^{G-1}``, ``u_i = Σ_{k in group i} t_k`` with consecutive groups.
    The block is replaced by the base simplex; the fiber is oriented so that
    fiber × base is the orientation of the total space.
    """
    sizes = list(group_sizes)
    if sum(sizes) - 1 != form.dims[block]:
        raise BlockMismatch(f"groups {sizes} do not cover Δ^{form.dims[block]}")
    if all(g == 1 for g in sizes):
        return form
    G = len(sizes)
    fdims = [g - 1 for g in sizes]
    before = form.dims[:block]
    after = form.dims[block + 1:]
    new_dims = (*before, G - 1, *fdims, *after)
    nb = len(before)
    base_idx = nb
    fiber_idx = list(range(nb + 1, nb + 1 + G))
    fulls = []
    for b in range(len(before)):
        fulls.append(identity_coords(new_dims, b, form.nparams))
    fulls.append(ell_coords(new_dims, base_idx, fiber_idx, form.nparams))
    for b in range(len(after)):
        fulls.append(identity_coords(new_dims, nb + 1 + G + b, form.nparams))
    params = [PolyForm.param(new_dims, k, form.nparams) for k in range(form.nparams)]
    pulled = form.pullback(new_dims, images_from_bary(form.dims, fulls, params), form.nparams)
    g = ell_sign(sizes)
    f = sum(fdims)
    if f * sum(before) % 2:
        g = -g
    return pulled.integrate_blocks(fiber_idx, sign=g)
