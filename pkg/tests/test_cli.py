import pytest

from fiberint.cli import Config, UnknownVerb, main, run_command
from fiberint.io import load_bundled


@pytest.fixture(scope="module")
def ws():
    return load_bundled()


@pytest.mark.parametrize("verb, args", [
    ("validate", ["torus"]),
    ("validate", ["torus_k1"]),
    ("nerve", ["cylinder"]),
    ("prism", ["torus"]),
    ("stokes", ["cylinder", "fibervol"]),
    ("integrate", ["cylinder", "fibervol"]),
    ("pushforward", ["torus", "torus_k1"]),
    ("compare", ["torus", "torus_k1"]),
    ("class-eq", ["torus_k1", "torus_k1"]),
    ("compare", ["cylinder", "omega_up", "cylinder_down", "omega_down"]),
])
def test_verbs_succeed(ws, verb, args):
    lines, ok = run_command(verb, args, ws, Config())
    assert ok, lines
    assert lines


def test_stokes_report(ws):
    lines, ok = run_command("stokes", ["cylinder", "fibervol"], ws)
    assert ok and any("residual = 0 (exact)" in line for line in lines)


def test_twisted_class_differs(ws):
    lines, ok = run_command("class-eq", ["torus_k1", "torus_twist"], ws, Config(cycles="torus_z"))
    assert not ok
    assert any("not equal" in line for line in lines)


def test_unknown_verb(ws):
    with pytest.raises(UnknownVerb):
        run_command("frob", [], ws)


def test_exit_codes(capsys, tmp_path):
    assert main(["stokes", "cylinder", "fibervol"]) == 0
    assert "residual = 0" in capsys.readouterr().out
    assert main(["frob", "x"]) == 2
    assert "unknown verb" in capsys.readouterr().err
    report = tmp_path / "r.txt"
    assert main(["class-eq", "torus_k1", "torus_twist", "--cycles", "torus_z",
                 "--report", str(report)]) == 1
    assert "not equal" in report.read_text()
    assert main(["validate", "nothing_by_this_name"]) == 2


def test_extra_workspace_file(tmp_path, capsys):
    f = tmp_path / "extra.complex"
    f.write_text("complex seg\nvertex 0\nvertex 1\nsimplex 0 1\nend\n")
    bad = tmp_path / "bad.form"
    bad.write_text("form w\nterm 0|0 1 1\nend\n")
    assert main(["--workspace", str(bad), "nerve", "cylinder"]) == 2
    assert "bad.form" in capsys.readouterr().err
