import json
import shutil
import subprocess
import textwrap

import pytest

from dps.cli import run

POT = """
[lattice]
n = [0, 5]
m = [0, 5]
[potential]
alpha = {preset = "sinusoidal", amplitude = 0.4, frequency = 0.7}
beta = [0.1, -0.3, 0.5, 0.2, 0.0]
p = 0.8
q = {preset = "linear", slope = 0.05, offset = 0.7}
[output]
lambda = [0.5, 1.0, 2.0]
obj = "pot.obj"
"""

AXIS = """
[lattice]
n = [0, 7]
m = [0, 4]
[axis]
u_row = {preset = "sinusoidal", amplitude = 1.0, frequency = 0.5, offset = 0.3}
u_col = {preset = "linear", slope = 0.4, offset = 0.3}
p = 1.0
q = 1.0
curve_flow = true
[output]
lambda = [1.0]
obj = "evo.obj"
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return str(path)


def test_build_and_validate(tmp_path):
    cfg = write(tmp_path, "pot.toml", POT)
    assert run(["build", "--config", cfg]) == 0
    for lam in ("0.5", "1", "2"):
        assert (tmp_path / f"pot_lambda{lam}.obj").exists()
    assert run(["validate", "--config", cfg, "--report", str(tmp_path / "v.json")]) == 0
    rep = json.loads((tmp_path / "v.json").read_text())
    assert rep["pass"] and rep["oracle"]["direct_frame_gap"] < 1e-8
    assert rep["oracle"]["alpha_from_frames"] < 1e-8


def test_evolve_with_curve_flow(tmp_path):
    cfg = write(tmp_path, "axis.toml", AXIS)
    assert run(["evolve", "--config", cfg]) == 0
    rep = json.loads((tmp_path / "evo.json").read_text())
    assert rep["checks"]["hirota_residual"] < 1e-12
    assert rep["curve_flow"]["1"]["congruence_residual"] < 1e-7


def test_examples(tmp_path):
    out = str(tmp_path / "am.obj")
    assert run(["example", "amsler", "--size", "6", "--out", out]) == 0
    rep = json.loads((tmp_path / "am.json").read_text())
    assert rep["amsler"]["pass"]
    out = str(tmp_path / "rev.obj")
    assert run(["example", "revolution", "--size", "6", "--out", out, "--lambda", "1"]) == 0
    assert json.loads((tmp_path / "rev.json").read_text())["rotation"]["pass"]


def test_config_errors(tmp_path, capsys):
    bad = write(tmp_path, "bad.toml", POT.replace("p = 0.8", "p = 2.0"))
    assert run(["build", "--config", bad]) == 2
    assert "0 < |p/2| < 1" in capsys.readouterr().err
    assert run(["build", "--config", str(tmp_path / "missing.toml")]) == 2
    nz = write(tmp_path, "a0.toml", POT.replace("amplitude = 0.4, frequency = 0.7",
                                                 "amplitude = 0.4, frequency = 0.7, offset = 0.2"))
    assert run(["build", "--config", nz]) == 2
    assert run(["build", "--config", write(tmp_path, "l.toml", POT), "--lambda", "-1"]) == 2
    assert run(["example", "revolution", "--q", "3"]) == 2


def test_numerical_failure_exit_code(tmp_path):
    cfg = write(tmp_path, "nc.toml", """
        [lattice]
        n = [0, 8]
        m = [0, 8]
        [potential]
        p = 1.0
        q = 1.0
        [solver]
        truncation_K = 2
        max_K = 2
        """)
    assert run(["build", "--config", cfg]) == 3


def test_byte_identical_runs(tmp_path):
    cfg = write(tmp_path, "pot.toml", POT.replace("lambda = [0.5, 1.0, 2.0]", "lambda = [1.0]"))
    blobs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        d.mkdir()
        obj, rep = d / "surface.obj", d / "surface.json"
        assert run(["build", "--config", cfg, "--out", str(obj), "--report", str(rep)]) == 0
        blobs.append((obj.read_bytes(), rep.read_bytes()))
    assert blobs[0] == blobs[1]


@pytest.mark.skipif(shutil.which("dps") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = subprocess.run(["dps", "example", "amsler", "--size", "4", "--out", str(tmp_path / "a.obj")],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("PASS")
