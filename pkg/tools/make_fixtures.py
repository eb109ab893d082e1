"""Regenerate the text fixtures shipped in ``src/fiberint/data``."""
from __future__ import annotations

import random
from pathlib import Path

from fiberint.complexes import Chain
from fiberint.deligne import circle_cycle, fundamental_cocycle, transgression_rep
from fiberint.examples import circle, cylinder, cylinder_fiber_volume, torus, torus_fiber_twist
from fiberint.io import (CycleBasis, serialize_bundle, serialize_complex, serialize_cycles, serialize_form,
                         serialize_rep, serialize_spaceform)
from fiberint.nerve import nerve_symbols, random_recipe

DATA = Path(__file__).resolve().parents[1] / "src" / "fiberint" / "data"


def write(name: str, *blocks: str) -> None:
    (DATA / name).write_text("\n\n".join(blocks) + "\n")
    print("wrote", name)


def rep_blocks(name: str, r, bundle: str, total: str) -> list:
    return [
        serialize_spaceform(f"{name}_alpha", r.alpha, total),
        serialize_form(f"{name}_lam", r.Lam, (bundle, "NK")),
        serialize_form(f"{name}_beta", r.beta, (bundle, "NK")),
        serialize_rep(name, r.level, f"{name}_lam", f"{name}_alpha", f"{name}_beta"),
    ]


def main() -> None:
    L = circle()
    write("circle.complex", serialize_complex("circle", L),
          serialize_cycles("circle_z", CycleBasis("circle", [circle_cycle(L)])),
          serialize_cycles("circle_pt", CycleBasis("circle", [Chain({(0,): 1})])))
    up, down, T = cylinder("up"), cylinder("down"), torus()
    write("cylinder.bundle", serialize_complex("cylinder_total", up.K),
          serialize_bundle("cylinder", up, "cylinder_total", "circle"))
    write("cylinder_down.bundle", serialize_complex("cylinder_down_total", down.K),
          serialize_bundle("cylinder_down", down, "cylinder_down_total", "circle"))
    fiber = Chain({(0, 1): 1, (1, 2): 1, (0, 2): -1})
    base = Chain({(0, 3): 1, (3, 6): 1, (0, 6): -1})
    write("torus.bundle", serialize_complex("torus_total", T.K),
          serialize_bundle("torus", T, "torus_total", "circle"),
          serialize_cycles("torus_z", CycleBasis("torus_total", [fiber, base])))
    write("fibervol.form", serialize_form("fibervol", cylinder_fiber_volume(up), ("cylinder", "NK")))

    # one exact 2-form, written on both staircase cylinders
    eta = random_recipe(nerve_symbols(up.NK), 1, random.Random(7), max_poly=1)
    omega = eta.d()
    write("boundary.form", serialize_form("omega_up", omega.on(up.NK), ("cylinder", "NK")),
          serialize_form("omega_down", omega.on(down.NK), ("cylinder_down", "NK")))

    r = transgression_rep(T.K, fundamental_cocycle(T, circle_cycle(T.L), 1), T.NK)
    write("torus_k1.rep", *rep_blocks("torus_k1", r, "torus", "torus_total"))
    write("torus_twist.rep", *rep_blocks("torus_twist", r.twist(torus_fiber_twist(T)), "torus", "torus_total"))


if __name__ == "__main__":
    main()
