"""Exact primitives of nerve forms by rational linear algebra."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .nerve import NerveForm, cell_dims, face_pullback, facets, index_faces, space_restriction
from .polyform import PolyForm


class NoPrimitive(ValueError):
    pass


def _monomial_basis(dims, degree: int, form_degree: int) -> list:
    """Monomials of total degree ≤ ``degree`` times every ``form_degree`` differential."""
    n = sum(dims)
    exps = []
    for k in range(degree + 1):
        for combo in combinations_with_replacement(range(n), k):
            e = [0] * n
            for v in combo:
                e[v] += 1
            exps.append(tuple(e))
    from itertools import combinations

    diffs = list(combinations(range(n), form_degree))
    return [PolyForm(dims, {(e, d): Fraction(1)}) for e in exps for d in diffs]


def find_primitive(form: NerveForm, degree: int | None = None) -> NerveForm:
    """A compatible ``μ`` with ``dμ = form``; raises :class:`NoPrimitive` if none exists.

    The ansatz on each cell is a polynomial form of bounded coefficient degree;
    face compatibility and ``dμ = form`` are linear conditions solved over ℚ.
    """
    nerve = form.nerve
    k = max(form.degrees(), default=1)
    if form.degrees() - {k}:
        raise ValueError("primitive search needs a homogeneous form")
    if k == 0:
        raise NoPrimitive("0-forms have no primitive")
    if degree is None:
        degree = max((v.poly_degree() for v in form.values.values()), default=0) + 1
    cells = nerve.cells()
    basis = {c: _monomial_basis(cell_dims(c), degree, k - 1) for c in cells}
    offset, n = {}, 0
    for c in cells:
        offset[c] = n
        n += len(basis[c])
    rows: list = []
    rhs: list = []

    def add_equations(pieces: list, target: PolyForm | None):
        """``Σ_unknowns coef·image == target`` coefficientwise; pieces are (unknown index, PolyForm)."""
        keys = set(target.terms) if target is not None else set()
        for _, img in pieces:
            keys |= set(img.terms)
        for key in keys:
            row = {}
            for j, img in pieces:
                c = img.terms.get(key)
                if c:
                    row[j] = row.get(j, 0) + c
            rows.append(row)
            rhs.append(target.terms.get(key, Fraction(0)) if target is not None else Fraction(0))

    for c in cells:
        key, rho = c
        base = offset[c]
        add_equations([(base + i, b.d()) for i, b in enumerate(basis[c])], form.get(c))
        for _, face, kind, i, j in index_faces(key):
            fc = (face, rho)
            pieces = [(base + m, face_pullback(b, key, face, kind, i, j)) for m, b in enumerate(basis[c])]
            pieces += [(offset[fc] + m, -b) for m, b in enumerate(basis[fc])]
            add_equations(pieces, None)
        for f in facets(rho):
            fc = (key, f)
            pieces = [(base + m, space_restriction(b, rho, f)) for m, b in enumerate(basis[c])]
            pieces += [(offset[fc] + m, -b) for m, b in enumerate(basis[fc])]
            add_equations(pieces, None)
    solution = _solve(rows, rhs, n)
    if solution is None:
        raise NoPrimitive(f"no primitive with coefficient degree ≤ {degree}")
    vals = {}
    for c in cells:
        acc = PolyForm.zero(cell_dims(c))
        for m, b in enumerate(basis[c]):
            x = solution[offset[c] + m]
            if x:
                acc = acc + b.scale(x)
        vals[c] = acc
    return NerveForm(nerve, vals)


def _solve(rows: list, rhs: list, n: int):
    """One rational solution of a sparse system, or ``None`` when inconsistent."""
    m = len(rows)
    dense = [[QQ(0)] * (n + 1) for _ in range(m)]
    for i, row in enumerate(rows):
        for j, c in row.items():
            dense[i][j] = QQ(c.numerator, c.denominator)
        b = rhs[i]
        dense[i][n] = QQ(b.numerator, b.denominator)
    M = DomainMatrix(dense, (m, n + 1), QQ)
    R, pivots = M.rref()
    if n in pivots:
        return None
    R = R.to_Matrix()
    x = [Fraction(0)] * n
    for r, p in enumerate(pivots):
        v = R[r, n]
        x[p] = Fraction(int(v.p), int(v.q))
    return x
