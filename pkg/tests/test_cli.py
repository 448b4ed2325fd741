import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from algact import cli


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = cli.main([*args, "--out", str(out)])
    return code, out


def read_csv(path):
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    rows = list(csv.DictReader([l for l in lines if not l.startswith("#")]))
    return comments, rows


def test_presets_lists_all(capsys):
    assert cli.main(["presets"]) == 0
    text = capsys.readouterr().out
    for name in ("l1-dominant-z", "l1-dominant-f2", "harmonic-f2", "li-example-f2"):
        assert name in text


def test_presets_json(tmp_path):
    code, out = run(tmp_path, "presets")
    assert code == 0
    data = json.loads((out / "presets.json").read_text())
    assert {d["name"] for d in data} >= {"harmonic-f2"} and all("f_json" in d for d in data)


def test_inverse_preset_neumann(tmp_path):
    code, out = run(tmp_path, "inverse", "--preset", "l1-dominant-z", "--method", "neumann", "--radius", "40")
    assert code == 0
    rep = json.loads((out / "inverse.json").read_text())
    assert rep["config"]["preset"] == "l1-dominant-z" and rep["R"] == 40
    assert rep["residual_left"] <= 1e-8
    comments, rows = read_csv(out / "inverse_coefficients.csv")
    assert comments[0].startswith("# config: ") and rows


def test_inverse_geometric_full_residual(tmp_path):
    code, out = run(tmp_path, "inverse", "--group", "Z", "--f", "2e-g", "--radius", "40")
    assert code == 0
    rep = json.loads((out / "inverse.json").read_text())
    assert rep["residual_left_full"] <= 2.0**-41


def test_inverse_harmonic_cg_history_monotone(tmp_path):
    code, out = run(tmp_path, "inverse", "--preset", "harmonic-f2", "--method", "cg-normal", "--radius", "6")
    assert code == 0
    h = json.loads((out / "inverse.json").read_text())["history"]
    assert all(b <= a for a, b in zip(h, h[1:]))


def test_inverse_failure_exit_2(tmp_path, capsys):
    code, out = run(tmp_path, "inverse", "--group", "Z", "--f", "e-g")
    assert code == 2
    assert "diverge" in capsys.readouterr().err
    rep = json.loads((out / "inverse.json").read_text())
    assert rep["status"] == "failure" and rep["config"]["f"] == "e-g"


def test_converge(tmp_path):
    code, out = run(
        tmp_path, "converge", "--preset", "l1-dominant-z", "--m", "1..50", "--alpha", "e", "--alpha", "2e-g", "--alpha", "0"
    )
    assert code == 0
    comments, rows = read_csv(out / "converge.csv")
    assert list(rows[0]) == cli.CSV_COLUMNS
    assert any(c.startswith("# solver: ") for c in comments)
    by = {}
    for r in rows:
        by.setdefault(r["alpha_id"], []).append(r)
    assert len(by["a0"]) == 50 and abs(float(by["a0"][-1]["exact"])) < 0.05
    assert all(float(r["exact"]) == 1.0 for r in by["a2"])
    dat = (out / "converge_a0.dat").read_text().splitlines()
    data = [l.split() for l in dat if not l.startswith("#")]
    assert len(data) == 50 and all(len(d) == 2 for d in data)


def test_converge_image_alpha_is_one(tmp_path):
    code, out = run(tmp_path, "converge", "--group", "Z", "--f", "2e-g", "--m", "1..50", "--alpha", "2e-g")
    assert code == 0
    sweep = json.loads((out / "converge.json").read_text())["sweeps"][0]
    assert sweep["haar_value"] == 1
    for row in sweep["rows"]:
        assert abs(row["exact"] - 1) <= row["tail_bound"]


def test_mc_consistent(tmp_path):
    code, out = run(tmp_path, "mc", "--preset", "harmonic-f2", "--m", "3", "--alpha", "e", "--N", "100000", "--seed", "1")
    assert code == 0
    comments, rows = read_csv(out / "mc.csv")
    r = rows[0]
    assert r["N"] == "100000" and r["seed"] == "1"
    err = abs(complex(float(r["mc_re"]), float(r["mc_im"])) - float(r["exact"]))
    assert err <= 5 * float(r["stderr"]) + float(r["tail_bound"])
    assert "residual_left" in comments[1]


def test_sample_m0_all_zero(tmp_path):
    code, out = run(tmp_path, "sample", "--preset", "l1-dominant-z", "--m", "0", "--N", "4", "--seed", "2")
    assert code == 0
    _, rows = read_csv(out / "sample.csv")
    assert len(rows) == 4 * 3 and all(float(r["value"]) == 0.0 for r in rows)


@pytest.mark.parametrize(
    "args",
    [
        ["mc", "--preset", "harmonic-f2"],
        ["sample", "--preset", "harmonic-f2"],
        ["verify"],
        ["inverse"],
        ["inverse", "--preset", "harmonic-f2", "--group", "Z", "--f", "e"],
        ["inverse", "--group", "Z", "--f", "2e-"],
        ["inverse", "--group", "Q", "--f", "e"],
        ["inverse", "--group", "Z", "--f", "1/2 e"],
        ["inverse", "--group", "Z", "--f", "2e-g", "--method", "torus-grid", "--grid", "100"],
        ["mc", "--group", "Z", "--f", "2e-g", "--seed", "1", "--alpha", "[e, g]"],
        ["verify", "--seed", "1", "--suite", "nope"],
        ["sample", "--preset", "harmonic-f2", "--seed", "1", "--m", "1,2"],
    ],
)
def test_config_errors_exit_3(tmp_path, args):
    code, _ = run(tmp_path, *args)
    assert code == 3


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"preset": "l1-dominant-f2", "radius": 4, "method": "cg-normal"}))
    code, out = run(tmp_path, "inverse", "--config", str(cfg), "--radius", "5")
    assert code == 0
    rep = json.loads((out / "inverse.json").read_text())
    assert rep["R"] == 5 and rep["method"] == "cg-normal"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert cli.main(["inverse", "--config", str(bad)]) == 3


def test_verify_pass_and_fail(tmp_path, monkeypatch):
    code, out = run(tmp_path, "verify", "--suite", "oracle", "--seed", "7")
    assert code == 0
    rep = json.loads((out / "verify.json").read_text())
    assert rep["passed"] and not rep["failures"]

    import algact.suites as suites

    monkeypatch.setattr(suites, "run_suites", lambda names, seed: [{"suite": "x", "name": "broken", "passed": False}])
    code, out = run(tmp_path, "verify", "--seed", "7")
    assert code == 1
    assert json.loads((out / "verify.json").read_text())["failures"] == ["broken"]


def test_default_radius_by_group(tmp_path):
    for group, f, R in (("Z", "3e-g", 40), ("Z^2", "5e-g-h", 10), ("F2", "3e-a", 6)):
        code, out = run(tmp_path, "inverse", "--group", group, "--f", f, "--formats", "json")
        assert code == 0
        assert json.loads((out / "inverse.json").read_text())["R"] == R


def test_parse_m_list():
    assert cli.parse_m_list("1..4") == [1, 2, 3, 4]
    assert cli.parse_m_list("1,3") == [1, 3]
    assert cli.parse_m_list([2, "5..6"]) == [2, 5, 6]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "algact", "presets"], capture_output=True, text=True)
    assert proc.returncode == 0 and "harmonic-f2" in proc.stdout
