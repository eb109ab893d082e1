"""Line-oriented text formats for complexes, bundles, forms, cycles and representatives.

A file is a sequence of named blocks::

    complex L
    vertex 0
    simplex 0 1
    end

    bundle cyl
    total K
    base L
    fiber 1
    map 0 -> 0
    orient 0 1 3 1
    end

    form vol
    nerve cyl NK
    term 0|0,1 1 t1_1 dt1_1
    end

    spaceform curv
    complex K
    term 0,1,3 2 1 dt1^dt2
    end

    cycles z
    complex L
    cycle +1 0,1 +1 1,2 -1 0,2
    end

    rep r
    level 1
    lam vol
    alpha curv
    beta vol
    end

Orientation lines may also be written ``orient 0 1 3 : 1``.
Nerve references are ``<bundle> NK|NL|NW`` or ``<complex> N``.  A term is
``term <cell> <p/q> <monomial> <differentials>``: the monomial is ``1`` or
``t1_2^3*t0_1``, the differentials are ``d`` (none) or ``dt0_1^dt1_2``.
Variable ``tB_J`` is the ``J``-th reduced coordinate of block ``B``; forms on
a single block write ``tJ``.  Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .bundle import BundleTriangulation, validate_bundle
from .complexes import Chain, Nerve, SimplicialComplex, UnknownSimplex, triangulated_nerve
from .deligne import DeligneRep
from .nerve import NerveForm, cell_dims
from .plforms import SpaceForm
from .polyform import PolyForm


class ParseError(ValueError):
    def __init__(self, line: int, reason: str, path: str = "<text>"):
        super().__init__(f"{path}:{line}: {reason}")
        self.line = line
        self.reason = reason
        self.path = path


class DanglingReference(LookupError):
    pass


@dataclass
class Workspace:
    complexes: dict = field(default_factory=dict)
    bundles: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)
    spaceforms: dict = field(default_factory=dict)
    cycles: dict = field(default_factory=dict)
    reps: dict = field(default_factory=dict)
    nerve_refs: dict = field(default_factory=dict)
    tol: float = 1e-8
    bump_c: float = 1.0

    def names(self) -> dict:
        out = {}
        for kind in ("complexes", "bundles", "forms", "spaceforms", "cycles", "reps"):
            for name in getattr(self, kind):
                out[name] = kind
        return out

    def lookup(self, name: str):
        for kind in ("bundles", "forms", "reps", "spaceforms", "cycles", "complexes"):
            table = getattr(self, kind)
            if name in table:
                return kind, table[name]
        raise DanglingReference(f"nothing named {name!r} in the workspace")

    def merge(self, other: "Workspace") -> None:
        for kind in ("complexes", "bundles", "forms", "spaceforms", "cycles", "reps", "nerve_refs"):
            getattr(self, kind).update(getattr(other, kind))

    def nerve(self, ref: tuple) -> Nerve:
        owner, kind = ref
        if kind == "N":
            if owner not in self.complexes:
                raise DanglingReference(f"nerve refers to unknown complex {owner!r}")
            return triangulated_nerve(self.complexes[owner])
        if owner not in self.bundles:
            raise DanglingReference(f"nerve refers to unknown bundle {owner!r}")
        return getattr(self.bundles[owner], kind)


# -- tokens -----------------------------------------------------------------------


def _vertex(tok: str):
    return int(tok) if re.fullmatch(r"-?\d+", tok) else tok


def _vertex_list(tok: str) -> tuple:
    return tuple(_vertex(v) for v in tok.split(",") if v != "")


def _fraction(tok: str) -> Fraction:
    return Fraction(tok)


_VAR = re.compile(r"t(?:(\d+)_)?(\d+)")


def _var_index(name: str, dims: tuple) -> int:
    m = _VAR.fullmatch(name)
    if not m:
        raise ValueError(f"bad variable {name!r}")
    b = int(m.group(1)) if m.group(1) is not None else 0
    j = int(m.group(2))
    if m.group(1) is None and len(dims) != 1:
        raise ValueError(f"variable {name!r} needs a block index here")
    if b >= len(dims) or not 1 <= j <= dims[b]:
        raise ValueError(f"variable {name!r} out of range for blocks {dims}")
    return sum(dims[:b]) + j - 1


def parse_term(tokens: list, dims: tuple) -> tuple:
    """``<p/q> <monomial> <differentials>`` → ``((exps, diffs), coefficient)``."""
    if len(tokens) != 3:
        raise ValueError("a term needs a coefficient, a monomial and differentials")
    coef = _fraction(tokens[0])
    n = sum(dims)
    e = [0] * n
    if tokens[1] != "1":
        for factor in tokens[1].split("*"):
            name, _, power = factor.partition("^")
            e[_var_index(name, dims)] += int(power) if power else 1
    diffs = []
    if tokens[2] != "d":
        for piece in tokens[2].split("^"):
            if not piece.startswith("d"):
                raise ValueError(f"bad differential {piece!r}")
            diffs.append(_var_index(piece[1:], dims))
    if len(set(diffs)) != len(diffs):
        return None, Fraction(0)
    sign = 1
    for i in range(len(diffs)):
        for j in range(i + 1, len(diffs)):
            if diffs[i] > diffs[j]:
                sign = -sign
    return (tuple(e), tuple(sorted(diffs))), coef * sign


def format_term(key, coef, form: PolyForm) -> str:
    e, d = key
    coef = Fraction(coef)
    mono = "*".join(form.var_name(v) + (f"^{k}" if k > 1 else "") for v, k in enumerate(e) if k) or "1"
    diff = "^".join("d" + form.var_name(v) for v in d) if d else "d"
    return f"{coef.numerator}/{coef.denominator} {mono} {diff}"


# -- parsing ------------------------------------------------------------------------


def _blocks(lines: Iterable[str], path: str):
    current = None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if current is None:
            if len(toks) != 2 or toks[0] not in ("complex", "bundle", "form", "spaceform", "cycles", "rep"):
                raise ParseError(no, f"expected a block header, got {line!r}", path)
            current = (toks[0], toks[1], no, [])
        elif toks == ["end"]:
            yield current
            current = None
        else:
            current[3].append((no, toks))
    if current is not None:
        raise ParseError(current[2], f"block {current[1]!r} is not closed with 'end'", path)


def parse_text(text: str, path: str = "<text>", into: Workspace | None = None) -> Workspace:
    """Parse one file's text; references may point into ``into`` (an existing workspace)."""
    ws = Workspace()
    base = into or Workspace()
    pending, seen = [], set()
    for kind, name, start, body in _blocks(text.splitlines(), path):
        if name in seen:
            raise ParseError(start, f"duplicate name {name!r}", path)
        seen.add(name)
        pending.append((kind, name, start, body))

    def resolve(table: str, name: str, no: int):
        for w in (ws, base):
            if name in getattr(w, table):
                return getattr(w, table)[name]
        raise DanglingReference(f"{path}:{no}: unknown {table[:-1] if table != 'complexes' else 'complex'} {name!r}")

    order = ["complex", "cycles", "bundle", "spaceform", "form", "rep"]
    for kind in order:
        for k, name, start, body in pending:
            if k != kind:
                continue
            handler = _HANDLERS[kind]
            obj = handler(ws, base, resolve, name, start, body, path)
            if kind == "form":
                ws.nerve_refs[name] = obj[1]
                obj = obj[0]
            getattr(ws, _TABLE[kind])[name] = obj
    return ws


_TABLE = {"complex": "complexes", "bundle": "bundles", "form": "forms", "spaceform": "spaceforms",
          "cycles": "cycles", "rep": "reps"}


def _parse_complex(ws, base, resolve, name, start, body, path):
    verts, simplices = [], []
    for no, toks in body:
        if toks[0] == "vertex" and len(toks) == 2:
            verts.append(_vertex(toks[1]))
        elif toks[0] == "simplex" and len(toks) >= 2:
            simplices.append((no, tuple(_vertex(t) for t in toks[1:])))
        else:
            raise ParseError(no, f"unexpected line in complex: {' '.join(toks)!r}", path)
    known = set(verts)
    if len(known) != len(verts):
        raise ParseError(start, "duplicate vertex", path)
    for no, s in simplices:
        for v in s:
            if v not in known:
                raise ParseError(no, f"simplex uses unknown vertex {v!r}", path)
        if len(set(s)) != len(s):
            raise ParseError(no, "simplex repeats a vertex", path)
    return SimplicialComplex(verts, [s for _, s in simplices])


def _parse_bundle(ws, base, resolve, name, start, body, path):
    fields, vmap, orient = {}, {}, {}
    for no, toks in body:
        head = toks[0]
        if head in ("total", "base", "fiber") and len(toks) == 2:
            fields[head] = (no, toks[1])
        elif head == "map" and len(toks) == 4 and toks[2] == "->":
            vmap[_vertex(toks[1])] = _vertex(toks[3])
        elif head == "orient" and len(toks) >= 3:
            if toks[-2] == ":":
                toks = toks[:-2] + toks[-1:]
            if toks[-1] not in ("1", "-1", "+1"):
                raise ParseError(no, "orientation must be ±1", path)
            orient[tuple(_vertex(t) for t in toks[1:-1])] = int(toks[-1])
        else:
            raise ParseError(no, f"unexpected line in bundle: {' '.join(toks)!r}", path)
    for f in ("total", "base", "fiber"):
        if f not in fields:
            raise ParseError(start, f"bundle needs a '{f}' line", path)
    K = resolve("complexes", fields["total"][1], fields["total"][0])
    L = resolve("complexes", fields["base"][1], fields["base"][0])
    for v in vmap:
        if v not in K.pos:
            raise ParseError(start, f"map uses unknown vertex {v!r}", path)
    for s in orient:
        try:
            K.canonical(s)
        except (UnknownSimplex, ValueError) as exc:
            raise ParseError(start, f"orientation of {s!r}: {exc}", path) from None
    B = validate_bundle(K, L, vmap, int(fields["fiber"][1]), orient)
    B.names = (fields["total"][1], fields["base"][1])
    if B.K.vertices != K.vertices:
        # later blocks see the total space in bundle order
        ws.complexes[fields["total"][1]] = B.K
    return B


def _parse_cell(tok: str, no: int, path: str):
    if "|" in tok:
        a, _, b = tok.partition("|")
        return (_vertex_list(a), _vertex_list(b))
    return _vertex_list(tok)


def _parse_form(ws, base, resolve, name, start, body, path):
    ref = None
    terms: dict = {}
    for no, toks in body:
        if toks[0] == "nerve" and len(toks) == 3 and toks[2] in ("NK", "NL", "NW", "N"):
            ref = (toks[1], toks[2])
            continue
        if toks[0] != "term" or len(toks) != 5:
            raise ParseError(no, f"unexpected line in form: {' '.join(toks)!r}", path)
        cell = _parse_cell(toks[1], no, path)
        if not isinstance(cell[0], tuple):
            raise ParseError(no, "form cells are written sigma|rho", path)
        try:
            key, c = parse_term(toks[2:], cell_dims(cell))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(no, str(exc), path) from None
        if key is not None:
            d = terms.setdefault(cell, {})
            d[key] = d.get(key, 0) + c
    if ref is None:
        raise ParseError(start, "form needs a 'nerve' line", path)
    owner = ref[0]
    table = "complexes" if ref[1] == "N" else "bundles"
    obj = resolve(table, owner, start)
    nerve = triangulated_nerve(obj) if ref[1] == "N" else getattr(obj, ref[1])
    for cell in terms:
        if cell not in nerve:
            raise ParseError(start, f"cell {cell!r} is not in nerve {ref[1]} of {owner!r}", path)
    vals = {c: PolyForm(cell_dims(c), t) for c, t in terms.items()}
    return NerveForm(nerve, vals), ref


def _parse_spaceform(ws, base, resolve, name, start, body, path):
    cref = None
    terms: dict = {}
    for no, toks in body:
        if toks[0] == "complex" and len(toks) == 2:
            cref = (no, toks[1])
            continue
        if toks[0] != "term" or len(toks) != 5:
            raise ParseError(no, f"unexpected line in spaceform: {' '.join(toks)!r}", path)
        rho = _vertex_list(toks[1])
        try:
            key, c = parse_term(toks[2:], (len(rho) - 1,))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(no, str(exc), path) from None
        if key is not None:
            d = terms.setdefault(rho, {})
            d[key] = d.get(key, 0) + c
    if cref is None:
        raise ParseError(start, "spaceform needs a 'complex' line", path)
    K = resolve("complexes", cref[1], cref[0])
    for rho in terms:
        if rho not in K:
            raise ParseError(start, f"{rho!r} is not a simplex of {cref[1]!r}", path)
    return SpaceForm(K, {r: PolyForm((len(r) - 1,), t) for r, t in terms.items()})


def _parse_cycles(ws, base, resolve, name, start, body, path):
    cref, cycles = None, []
    for no, toks in body:
        if toks[0] == "complex" and len(toks) == 2:
            cref = (no, toks[1])
        elif toks[0] == "cycle" and len(toks) % 2 == 1:
            ch = Chain()
            for c, s in zip(toks[1::2], toks[2::2]):
                ch.add(_vertex_list(s), int(c))
            cycles.append((no, ch))
        else:
            raise ParseError(no, f"unexpected line in cycles: {' '.join(toks)!r}", path)
    if cref is None:
        raise ParseError(start, "cycles need a 'complex' line", path)
    L = resolve("complexes", cref[1], cref[0])
    from .complexes import boundary_chain

    for no, ch in cycles:
        for s in ch:
            if s not in L:
                raise ParseError(no, f"{s!r} is not a simplex of {cref[1]!r}", path)
        if boundary_chain(ch):
            raise ParseError(no, "chain is not a cycle", path)
    return CycleBasis(cref[1], [c for _, c in cycles])


@dataclass
class CycleBasis:
    complex: str
    cycles: list

    def __eq__(self, other):
        return isinstance(other, CycleBasis) and self.complex == other.complex and \
            [dict(c) for c in self.cycles] == [dict(c) for c in other.cycles]


def _parse_rep(ws, base, resolve, name, start, body, path):
    fields = {}
    for no, toks in body:
        if toks[0] in ("level", "lam", "alpha", "beta") and len(toks) == 2:
            fields[toks[0]] = (no, toks[1])
        else:
            raise ParseError(no, f"unexpected line in rep: {' '.join(toks)!r}", path)
    for f in ("level", "lam", "alpha", "beta"):
        if f not in fields:
            raise ParseError(start, f"rep needs a '{f}' line", path)
    lam = resolve("forms", fields["lam"][1], fields["lam"][0])
    beta = resolve("forms", fields["beta"][1], fields["beta"][0])
    alpha = resolve("spaceforms", fields["alpha"][1], fields["alpha"][0])
    rep = DeligneRep(int(fields["level"][1]), lam, alpha, beta)
    rep.names = (fields["lam"][1], fields["alpha"][1], fields["beta"][1])
    return rep


_HANDLERS = {"complex": _parse_complex, "bundle": _parse_bundle, "form": _parse_form,
             "spaceform": _parse_spaceform, "cycles": _parse_cycles, "rep": _parse_rep}


def parse_workspace(paths: Iterable, base: Workspace | None = None) -> Workspace:
    """Parse files in order; later files may refer to names defined earlier."""
    ws = base or Workspace()
    for p in paths:
        p = Path(p)
        part = parse_text(p.read_text(), str(p), into=ws)
        ws.merge(part)
    return ws


# -- serialisation ------------------------------------------------------------------


def _fmt_vertices(s) -> str:
    return ",".join(map(str, s))


def serialize_complex(name: str, K: SimplicialComplex) -> str:
    lines = [f"complex {name}"]
    lines += [f"vertex {v}" for v in K.vertices]
    lines += ["simplex " + " ".join(map(str, s)) for s in K.maximal()]
    return "\n".join(lines + ["end"])


def serialize_bundle(name: str, B: BundleTriangulation, total: str, base: str) -> str:
    lines = [f"bundle {name}", f"total {total}", f"base {base}", f"fiber {B.n}"]
    lines += [f"map {v} -> {B.vmap[v]}" for v in B.K.vertices]
    lines += ["orient " + " ".join(map(str, s)) + f" {o}" for s, o in sorted(B._orientation.items(), key=lambda x: B.K.key(x[0]))]
    return "\n".join(lines + ["end"])


def _sorted_cells(values: dict):
    return sorted(values.items(), key=lambda kv: repr(kv[0]))


def serialize_form(name: str, form: NerveForm, ref: tuple) -> str:
    lines = [f"form {name}", f"nerve {ref[0]} {ref[1]}"]
    for (sigma, rho), v in _sorted_cells(form.values):
        cell = f"{_fmt_vertices(sigma)}|{_fmt_vertices(rho)}"
        for key, c in sorted(v.terms.items()):
            lines.append(f"term {cell} {format_term(key, c, v)}")
    return "\n".join(lines + ["end"])


def serialize_spaceform(name: str, form: SpaceForm, complex_name: str) -> str:
    lines = [f"spaceform {name}", f"complex {complex_name}"]
    for rho, v in _sorted_cells(form.values):
        for key, c in sorted(v.terms.items()):
            lines.append(f"term {_fmt_vertices(rho)} {format_term(key, c, v)}")
    return "\n".join(lines + ["end"])


def serialize_cycles(name: str, basis: CycleBasis) -> str:
    lines = [f"cycles {name}", f"complex {basis.complex}"]
    for ch in basis.cycles:
        parts = [f"{'+' if c > 0 else ''}{c} {_fmt_vertices(s)}" for s, c in sorted(ch.items(), key=repr)]
        lines.append("cycle " + " ".join(parts))
    return "\n".join(lines + ["end"])


def serialize_rep(name: str, level: int, lam: str, alpha: str, beta: str) -> str:
    return "\n".join([f"rep {name}", f"level {level}", f"lam {lam}", f"alpha {alpha}", f"beta {beta}", "end"])


def _complex_name(ws: Workspace, K) -> str:
    for n, c in ws.complexes.items():
        if c is K or c == K:
            return n
    raise DanglingReference("complex is not registered in the workspace")


def serialize_workspace(ws: Workspace) -> str:
    parts = [serialize_complex(n, K) for n, K in ws.complexes.items()]
    for n, B in ws.bundles.items():
        total, base = getattr(B, "names", (_complex_name(ws, B.K), _complex_name(ws, B.L)))
        parts.append(serialize_bundle(n, B, total, base))
    parts += [serialize_cycles(n, c) for n, c in ws.cycles.items()]
    for n, f in ws.spaceforms.items():
        parts.append(serialize_spaceform(n, f, _complex_name(ws, f.complex)))
    for n, f in ws.forms.items():
        parts.append(serialize_form(n, f, ws.nerve_refs[n]))
    for n, r in ws.reps.items():
        lam, alpha, beta = r.names
        parts.append(serialize_rep(n, r.level, lam, alpha, beta))
    return "\n\n".join(parts) + "\n"


_SUFFIX_ORDER = {".complex": 0, ".bundle": 1, ".form": 2, ".rep": 3}


def order_paths(paths: Iterable) -> list:
    """Dependency order: complexes, bundles, forms, representatives."""
    return sorted((Path(p) for p in paths), key=lambda p: (_SUFFIX_ORDER.get(p.suffix, 4), p.name))


def data_dir() -> Path:
    return Path(__file__).with_name("data")


def load_bundled() -> Workspace:
    """The shipped fixtures: circle, cylinders, torus, fiber volume and torus representatives."""
    return parse_workspace(order_paths(data_dir().iterdir()))
