import json
import subprocess
import sys
from pathlib import Path

import pytest

from padictri.cli import main, run

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def sample(name):
    return str(SAMPLES / name)


def report(argv):
    code, out, _ = run(argv)
    return code, json.loads(out)


def test_simplex_check_accepts_b():
    code, rep = report(["simplex-check", sample("simplex_B.json")])
    assert code == 0
    assert rep["is_simplex"] and rep["chain"] == [[], [2], [1, 2]]


def test_simplex_check_rejects_n_times_n():
    code, rep = report(["simplex-check", sample("polytope_NN.json")])
    assert code == 1
    assert rep["incomparable"] == [[1], [2]]


def test_malformed_input_exits_with_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1]")
    assert run(["faces", str(bad)])[0] == 2
    bad.write_text('{"polytope": {"q": 2}}')
    assert run(["faces", str(bad)])[0] == 2
    bad.write_text("{not json")
    assert run(["faces", str(bad)])[0] == 2
    assert run(["faces", str(tmp_path / "missing.json")])[0] == 2


@pytest.mark.parametrize("cmd, name", [
    ("faces", "simplex_B.json"),
    ("validate-polytope", "polytope_NN.json"),
    ("complex-check", "complex.json"),
    ("retract", "retract.json"),
    ("dispatch", "monoplex.json"),
    ("triangulate-cells", "monoplex.json"),
    ("good-direction", "good_direction.json"),
    ("oracle", "oracle_B.json"),
])
def test_commands_succeed_on_samples(cmd, name):
    code, rep = report([cmd, sample(name)])
    assert code == 0, rep
    assert "error" not in rep


def test_output_is_byte_identical_across_runs():
    for cmd, name in [("triangulate-cells", "monoplex.json"), ("retract", "retract.json"),
                      ("good-direction", "good_direction.json")]:
        assert run([cmd, sample(name)]) == run([cmd, sample(name)])


def test_specific_reports():
    _, rep = report(["complex-check", sample("complex.json")])
    assert rep["is_closed"] and rep["violations"] == []
    _, rep = report(["triangulate-cells", sample("monoplex.json")])
    assert rep["ok"] and all(c["ok"] for c in rep["components"])
    _, rep = report(["good-direction", sample("good_direction.json")])
    assert rep["eta"] == ["3"] and rep["certified"]
    _, rep = report(["oracle", sample("oracle_B.json")])
    assert rep["count"] == 15 and ["+inf", "+inf"] in rep["points"]


def test_output_and_dot_files(tmp_path):
    out, dot = tmp_path / "r.json", tmp_path / "f.dot"
    code = main(["faces", sample("simplex_B.json"), "-o", str(out), "--dot", str(dot)])
    assert code == 0
    assert json.loads(out.read_text())["faces"]
    assert dot.read_text().startswith("digraph")


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "padictri.cli", "validate-polytope", sample("polytope_NN.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["valid"]
