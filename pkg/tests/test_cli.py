import csv
import io
import json
import math
import subprocess
import sys

import pytest

from phasepsr import cli
from phasepsr.circuits import Circuit, circuit_unitary
from phasepsr.protocols import build_2to1_cnot
from phasepsr.qlinalg import max_abs


def run_main(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("text,value", [
    ("0", 0.0), ("1.25", 1.25), ("pi", math.pi), ("pi/2", math.pi / 2),
    ("-3pi/4", -3 * math.pi / 4), ("2*pi/3", 2 * math.pi / 3), ("-pi", -math.pi),
])
def test_parse_angle(text, value):
    assert cli.parse_angle(text) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("text", ["abc", "pi/0", "inf", "nan"])
def test_parse_angle_rejects(text):
    with pytest.raises(cli.UsageError):
        cli.parse_angle(text)


def test_parse_sweep_includes_both_ends():
    pts = cli.parse_sweep("0:pi:5")
    assert len(pts) == 5 and pts[0] == 0.0 and pts[-1] == pytest.approx(math.pi)
    for bad in ("0:1", "0:1:x", "0:1:0"):
        with pytest.raises(cli.UsageError):
            cli.parse_sweep(bad)


def test_parse_xi_variants():
    assert cli.parse_xi("1").matrix[1, 1] == 1
    assert cli.parse_xi("-i").matrix[0, 1] == pytest.approx(0.5j)
    assert cli.parse_xi("bloch:0,0,0.5").matrix[0, 0] == pytest.approx(0.75)
    assert cli.parse_xi("haar:3").matrix.tolist() == cli.parse_xi("haar:3").matrix.tolist()
    assert cli.parse_xi("mixed:3").min_eigenvalue() >= -1e-15
    for bad in ("2", "bloch:1,1,1", "haar:x", "blue:1"):
        with pytest.raises(cli.UsageError):
            cli.parse_xi(bad)


def test_run_single_csv(capsys):
    code, out, _ = run_main(capsys, "run", "--protocol", "single", "--phi", "pi/2")
    assert code == 0
    assert out.startswith("protocol,phi,label,probability,frequency,success,fidelity\r\n")
    rows = parse_csv(out)
    assert [r["label"] for r in rows] == ["0", "1"]
    assert [r["success"] for r in rows] == ["true", "false"]
    assert float(rows[0]["probability"]) == pytest.approx(0.5, abs=1e-15)
    assert float(rows[0]["fidelity"]) == pytest.approx(1.0, abs=1e-12)
    # |+> rotated by -pi/2 is orthogonal to |+> rotated by +pi/2
    assert float(rows[1]["fidelity"]) == pytest.approx(0.0, abs=1e-12)
    assert rows[0]["frequency"] == ""


def test_run_qudit_json(capsys):
    code, out, _ = run_main(capsys, "run", "--protocol", "qudit", "--n", "3", "--phi", "1",
                            "--xi", "haar:5", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert [r["label"] for r in rows] == ["0", "1", "2", "3"]
    assert all(r["probability"] == pytest.approx(0.25, abs=1e-15) for r in rows)
    assert set(rows[0]) == set(cli.FIELDS)


def test_sweep_rows(capsys):
    code, out, _ = run_main(capsys, "sweep", "--protocol", "vmc", "--k", "2",
                            "--phi-sweep", "0:pi:3")
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 9
    assert sorted({float(r["phi"]) for r in rows}) == pytest.approx([0, math.pi / 2, math.pi])


def test_sample_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert cli.main(["sample", "--protocol", "two_cnot", "--phi-sweep", "0:1:3",
                         "--xi", "mixed:2", "--shots", "2000", "--seed", "42",
                         "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = parse_csv(paths[0].read_text())
    for point in range(3):
        block = rows[4 * point:4 * point + 4]
        assert math.fsum(float(r["frequency"]) for r in block) == pytest.approx(1.0)
    cli.main(["sample", "--protocol", "two_cnot", "--phi-sweep", "0:1:3", "--xi", "mixed:2",
              "--shots", "2000", "--seed", "43", "--out", str(paths[1])])
    assert paths[0].read_bytes() != paths[1].read_bytes()


@pytest.mark.parametrize("argv", [
    ["run", "--protocol", "vmc", "--k", "0", "--phi", "1"],
    ["run", "--protocol", "qudit", "--phi", "1"],
    ["run", "--protocol", "single", "--phi", "one"],
    ["sweep", "--protocol", "single", "--phi", "1"],
    ["sample", "--protocol", "single", "--phi", "1"],
    ["run", "--protocol", "single", "--phi", "1", "--xi", "bloch:2,0,0"],
    ["lp", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run_main(capsys, *argv)
    assert code == 2
    assert out == ""
    assert "phasepsr: error:" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--protocol", "teleport", "--phi", "1"])
    assert exc.value.code == 2


def test_verify_passes(capsys):
    code, out, _ = run_main(capsys, "verify", "circuits")
    assert code == 0
    lines = out.strip().splitlines()
    assert all(line.startswith("PASS") for line in lines[:-1])
    assert lines[-1].endswith("checks passed")


def test_verify_failure_exit_code(capsys, monkeypatch):
    from phasepsr.verify import Check
    monkeypatch.setattr(cli, "run_suites", lambda name: [Check("x", "broken", 1.0, 0.0, False)])
    code, out, _ = run_main(capsys, "verify")
    assert code == 1
    assert out.startswith("FAIL [x] broken")


def test_lp_text_and_json(capsys):
    code, out, _ = run_main(capsys, "lp", "4")
    assert code == 0 and "optimum      = 0.8" in out
    code, out, _ = run_main(capsys, "lp", "--n", "5", "--format", "json")
    doc = json.loads(out)
    assert doc["optimum"] == pytest.approx(5 / 6, abs=1e-12)
    assert doc["argmax_p"] == pytest.approx([1 / 6] * 6, abs=1e-12)


def test_export_circuit_roundtrip(capsys, tmp_path):
    out = tmp_path / "c.json"
    assert cli.main(["export-circuit", "two_cnot", "--phi", "pi/3", "--out", str(out)]) == 0
    c = Circuit.from_json(out.read_text())
    assert c.count("cnot") == 8
    assert max_abs(circuit_unitary(c) - circuit_unitary(build_2to1_cnot(math.pi / 3))) < 1e-15
    code, text, _ = run_main(capsys, "export-circuit", "shift_down_v3")
    assert json.loads(text)["register_dims"] == [2, 2]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "phasepsr", "lp", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert "N = 2" in res.stdout
