"""Command-line front end: ``fiberint <verb> <args> [--tol] [--bump-c] [--report PATH]``.

Arguments name objects of the workspace (the shipped fixtures plus any
``--workspace`` files) or are paths to files; a path stands for the object
the file defines.  Exit status is 0 iff every check of the verb passes, 1 when
a check fails, 2 for usage and parse errors and 3 for other domain errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .bundle import check_orientation
from .compare import boundary_dependence, compare_pushforwards
from .deligne import class_report, deligne_product, holonomy, pushforward, validate_rep
from .integration import integrate_KL, integrate_pou, pou_stokes_residual, prism_checks, stokes_residual
from .io import (DanglingReference, ParseError, Workspace, load_bundled, parse_text, serialize_form,
                 serialize_spaceform)
from .products import BumpQuadrature

log = logging.getLogger(__name__)

VERBS = ("validate", "nerve", "prism", "integrate", "stokes", "pushforward", "product", "class-eq", "compare")


class UnknownVerb(ValueError):
    pass


class UsageError(ValueError):
    pass


@dataclass
class Config:
    tol: float = 1e-8
    bump_c: float = 1.0
    method: str = "combinatorial"
    cycles: str | None = None

    def quadrature(self) -> BumpQuadrature:
        return BumpQuadrature(kappa=self.bump_c)


# -- argument resolution --------------------------------------------------------------

_PRIORITY = ("reps", "forms", "bundles", "spaceforms", "cycles", "complexes")


def resolve(ws: Workspace, token: str, want: tuple = _PRIORITY) -> tuple:
    """``(kind, name, object)`` for a workspace name or a file path."""
    path = Path(token)
    if path.is_file():
        part = parse_text(path.read_text(), str(path), into=ws)
        ws.merge(part)
        for kind in want:
            table = getattr(part, kind)
            if len(table) == 1:
                name, obj = next(iter(table.items()))
                return kind, name, obj
            if table:
                raise UsageError(f"{token} defines several {kind}; name one of {sorted(table)}")
        raise UsageError(f"{token} defines nothing usable here")
    for kind in want:
        table = getattr(ws, kind)
        if token in table:
            return kind, token, table[token]
    raise DanglingReference(f"nothing named {token!r} of kind {'/'.join(want)}")


def _bundle_name(ws: Workspace, B) -> str:
    for n, b in ws.bundles.items():
        if b is B:
            return n
    return "bundle"


def _owner_bundle(ws: Workspace, form_name: str):
    owner, kind = ws.nerve_refs[form_name]
    return ws.bundles.get(owner), kind


def _cycles_for(ws: Workspace, cfg: Config, space, dim: int) -> list:
    if cfg.cycles:
        return list(ws.cycles[cfg.cycles].cycles)
    for name in sorted(ws.cycles):
        basis = ws.cycles[name]
        K = ws.complexes.get(basis.complex)
        if K is not None and K == space and all(len(s) - 1 == dim for c in basis.cycles for s in c):
            return list(basis.cycles)
    return []


def _check(ok: bool) -> str:
    return "yes" if ok else "NO"


# -- verbs --------------------------------------------------------------------------------


def cmd_validate(ws, args, cfg):
    if len(args) != 1:
        raise UsageError("validate <bundle|rep|form>")
    kind, name, obj = resolve(ws, args[0])
    if kind == "bundles":
        B = obj
        check_orientation(B)
        lines = [f"bundle {name}", f"fiber dimension: {B.n}",
                 f"K f-vector: {[len(B.K.simplices(k)) for k in range(B.K.dim + 1)]}",
                 f"L f-vector: {[len(B.L.simplices(k)) for k in range(B.L.dim + 1)]}",
                 f"top simplices oriented: {len(B._orientation)}",
                 "orientation consistent: yes",
                 f"fiber boundary: {'non-empty' if B.has_boundary() else 'empty'}"]
        return lines, True
    if kind == "reps":
        rep = validate_rep(obj, tol=cfg.tol, strict=False)
        return [f"rep {name} (level {obj.level})"] + rep.lines(), rep.ok
    if kind == "forms":
        fails = obj.compatibility_failures(limit=5)
        lines = [f"form {name}", f"degrees: {sorted(obj.degrees())}",
                 f"face compatible: {_check(not fails)}", f"integral: {_check(obj.is_integral())}"]
        lines += [f"FAIL {f}" for f in fails]
        return lines, not fails
    raise UsageError(f"cannot validate a {kind[:-1]}")


def cmd_nerve(ws, args, cfg):
    if len(args) not in (1, 2):
        raise UsageError("nerve <bundle|complex> [NL|NK|NW|PN]")
    kind, name, obj = resolve(ws, args[0], ("bundles", "complexes"))
    if kind == "bundles":
        which = [args[1]] if len(args) == 2 else ["NL", "NK", "NW", "PN"]
        nerves = [(w, getattr(obj, w)) for w in which]
    else:
        from .complexes import triangulated_nerve

        nerves = [("N", triangulated_nerve(obj))]
    lines = []
    for label, N in nerves:
        counts = [len(N.cells(p)) for p in range(N.index.dim + 1)]
        lines.append(f"{name} {label}: cells by index dimension {counts}, total {sum(counts)}")
    return lines, True


def cmd_prism(ws, args, cfg):
    if len(args) != 1:
        raise UsageError("prism <bundle>")
    _, name, B = resolve(ws, args[0], ("bundles",))
    lines = [f"bundle {name}"]
    for eta in B.L.maximal():
        counts = [len(B.enumerate_prismatic(eta, f)) for f in range(B.n + 1)]
        from .bundle import boundary_F

        dF = boundary_F(B.fundamental_class(eta))
        lines.append(f"over {eta}: prismatic simplices by fiber dimension {counts}; "
                     f"dF[Y|eta] has {len(dF)} terms")
    checks = prism_checks(B)
    n = checks.pop("generators")
    lines.append(f"generators: {n}")
    for k, v in checks.items():
        lines.append(f"{k}: {'0 (exact)' if v == 0 else f'{v} failures'}")
    return lines, not any(checks.values())


def _integrate(omega, B, cfg):
    if cfg.method == "pou":
        return integrate_pou(omega, B)
    return integrate_KL(omega, B)


def _form_and_bundle(ws, args, verb):
    if len(args) == 2:
        _, bname, B = resolve(ws, args[0], ("bundles",))
        _, fname, omega = resolve(ws, args[1], ("forms",))
    elif len(args) == 1:
        _, fname, omega = resolve(ws, args[0], ("forms",))
        B, _ = _owner_bundle(ws, fname)
        if B is None:
            raise UsageError(f"{verb}: form {fname!r} is not on a bundle nerve")
        bname = _bundle_name(ws, B)
    else:
        raise UsageError(f"{verb} <bundle> <form>")
    if omega.nerve != B.NK:
        raise UsageError(f"{verb}: form {fname!r} does not live on the nerve of the total space of {bname!r}")
    return bname, B, fname, omega


def cmd_integrate(ws, args, cfg):
    bname, B, fname, omega = _form_and_bundle(ws, args, "integrate")
    out = _integrate(omega, B, cfg)
    lines = [f"integral of {fname} over the fibers of {bname} ({cfg.method})"]
    lines += serialize_form(f"{fname}_int", out, (bname, "NL")).splitlines()
    return lines, True


def cmd_stokes(ws, args, cfg):
    bname, B, fname, omega = _form_and_bundle(ws, args, "stokes")
    res = pou_stokes_residual(omega, B) if cfg.method == "pou" else stokes_residual(omega, B)
    if res.is_zero():
        return [f"stokes {bname} {fname} ({cfg.method})", "residual = 0 (exact)"], True
    return [f"stokes {bname} {fname} ({cfg.method})",
            f"residual nonzero on {len(res.values)} cells"], False


def _rep_and_bundle(ws, args, verb):
    if len(args) != 2:
        raise UsageError(f"{verb} <bundle> <rep>")
    _, bname, B = resolve(ws, args[0], ("bundles",))
    _, rname, r = resolve(ws, args[1], ("reps",))
    return bname, B, rname, r


def cmd_pushforward(ws, args, cfg):
    bname, B, rname, r = _rep_and_bundle(ws, args, "pushforward")
    out = pushforward(r, B, cfg.method)
    rep = validate_rep(out, tol=cfg.tol, strict=False)
    lines = [f"pushforward of {rname} along {bname} ({cfg.method}): level {out.level}"]
    lines += rep.lines()
    lines += serialize_spaceform(f"{rname}_curvature", out.alpha, ws_complex_name(ws, B.L)).splitlines()
    from .plforms import integrate_cycle

    for k, z in enumerate(_cycles_for(ws, cfg, B.L, out.level + 1)):
        lines.append(f"curvature period {k}: {integrate_cycle(out.alpha, z)}")
    for k, z in enumerate(_cycles_for(ws, cfg, B.L, out.level)):
        lines.append(f"holonomy {k}: {holonomy(out, z)}")
    return lines, rep.ok


def ws_complex_name(ws: Workspace, K) -> str:
    for n, c in ws.complexes.items():
        if c == K:
            return n
    return "base"


def cmd_product(ws, args, cfg):
    if len(args) != 2:
        raise UsageError("product <rep> <rep>")
    _, n1, r1 = resolve(ws, args[0], ("reps",))
    _, n2, r2 = resolve(ws, args[1], ("reps",))
    if r1.nerve != r2.nerve:
        raise UsageError("the two representatives live on different nerves")
    out = deligne_product(r1, r2, cfg.quadrature())
    rep = validate_rep(out, tol=cfg.tol, strict=False)
    lines = [f"product {n1} * {n2}: level {out.level}, bump c = {cfg.bump_c:g}"] + rep.lines()
    lines += serialize_spaceform(f"{n1}_{n2}_curvature", out.alpha,
                                 ws_complex_name(ws, out.alpha.complex)).splitlines()
    return lines, rep.ok


def cmd_class_eq(ws, args, cfg):
    if len(args) != 2:
        raise UsageError("class-eq <rep> <rep>")
    _, n1, r1 = resolve(ws, args[0], ("reps",))
    _, n2, r2 = resolve(ws, args[1], ("reps",))
    cycles = _cycles_for(ws, cfg, r1.nerve.space, r1.level)
    rep = class_report(r1, r2, cycles, cfg.tol)
    if not cycles:
        same = r1.Lam == r2.Lam and r1.beta == r2.beta if not (r1.approximate or r2.approximate) else False
        rep.checks["holonomy"] = "no cycle basis for this space"
        rep.checks["identical representatives"] = same
        rep.ok = rep.ok and same
        if not same:
            rep.failures.append("holonomy not compared: give --cycles")
    return [f"class-eq {n1} {n2}: {'equal' if rep.ok else 'not equal'}"] + rep.lines(), rep.ok


def cmd_compare(ws, args, cfg):
    if len(args) == 2:
        bname, B, rname, r = _rep_and_bundle(ws, args, "compare")
        cycles = _cycles_for(ws, cfg, B.L, r.level - B.n)
        rep = compare_pushforwards(r, B, cycles, strict=False)
        return [f"compare pushforwards of {rname} along {bname}"] + rep.lines(), rep.ok
    if len(args) == 4:
        _, b1, B1 = resolve(ws, args[0], ("bundles",))
        _, f1, w1 = resolve(ws, args[1], ("forms",))
        _, b2, B2 = resolve(ws, args[2], ("bundles",))
        _, f2, w2 = resolve(ws, args[3], ("forms",))
        degree = max(w1.degrees(), default=B1.n) - B1.n
        cycles = _cycles_for(ws, cfg, B1.L, degree)
        rep, diff, mu = boundary_dependence(w1, B1, w2, B2, cycles)
        lines = [f"compare integrals of {f1} over {b1} and {f2} over {b2}"] + rep.lines()
        if mu is not None and not mu.is_zero():
            lines += serialize_form("primitive", mu, (b1, "NL")).splitlines()
        return lines, rep.ok
    raise UsageError("compare <bundle> <rep>  |  compare <bundle> <form> <bundle> <form>")


_COMMANDS = {"validate": cmd_validate, "nerve": cmd_nerve, "prism": cmd_prism, "integrate": cmd_integrate,
             "stokes": cmd_stokes, "pushforward": cmd_pushforward, "product": cmd_product,
             "class-eq": cmd_class_eq, "compare": cmd_compare}


def run_command(verb: str, args: list, ws: Workspace, cfg: Config | None = None) -> tuple:
    """Run one verb; returns ``(report lines, ok)``."""
    if verb not in _COMMANDS:
        raise UnknownVerb(f"unknown verb {verb!r}; expected one of {', '.join(VERBS)}")
    return _COMMANDS[verb](ws, list(args), cfg or Config())


# -- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fiberint", description="Integration along the fibers of triangulated bundles.")
    p.add_argument("verb", help=", ".join(VERBS))
    p.add_argument("args", nargs="*")
    p.add_argument("--tol", type=float, default=1e-8, help="tolerance for approximate comparisons")
    p.add_argument("--bump-c", type=float, default=1.0, help="bump steepness c in exp(-c/(t(1-t)))")
    p.add_argument("--report", type=Path, help="also write the report to this file")
    p.add_argument("--method", choices=("combinatorial", "pou"), default="combinatorial")
    p.add_argument("--cycles", help="name of the cycle basis used for holonomy")
    p.add_argument("--workspace", action="append", default=[], type=Path,
                   help="extra definition files (repeatable)")
    p.add_argument("--no-fixtures", action="store_true", help="do not preload the shipped fixtures")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_intermixed_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    cfg = Config(tol=ns.tol, bump_c=ns.bump_c, method=ns.method, cycles=ns.cycles)
    try:
        ws = Workspace() if ns.no_fixtures else load_bundled()
        from .io import order_paths, parse_workspace

        parse_workspace(order_paths(ns.workspace), base=ws)
        lines, ok = run_command(ns.verb, ns.args, ws, cfg)
        status = 0 if ok else 1
    except (UnknownVerb, UsageError, ParseError, DanglingReference) as exc:
        lines, status = [f"error: {exc}"], 2
    except (ValueError, KeyError, ArithmeticError, AssertionError, RuntimeError) as exc:
        log.debug("domain error", exc_info=True)
        lines, status = [f"error: {type(exc).__name__}: {exc}"], 3
    text = "\n".join(lines) + "\n"
    (sys.stdout if status != 2 else sys.stderr).write(text)
    if ns.report is not None:
        ns.report.write_text(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
