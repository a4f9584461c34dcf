import json
import shutil
from pathlib import Path

import pytest

from ncalc.cli import SCENARIO_DIR, bundled_scenarios, main
from ncalc.report import csv_text
from ncalc.errors import InputError

EXPECTED = {"verify-heisenberg", "verify-iso11", "verify-iso31", "verify-iso21", "ito-all",
            "charfunc-iso11", "charfunc-iso31", "integral-demo", "type2-demo"}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_bundled_scenarios_present():
    assert set(bundled_scenarios()) == EXPECTED
    for name in EXPECTED:
        assert (SCENARIO_DIR / "fixtures" / name).is_dir()


def test_verify_iso11_passes(tmp_path, capsys):
    assert main(["verify", "--config", "verify-iso11", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "verify-iso11" / "report.json").read_text())
    assert report["status"] == "pass"
    assert "PASS" in capsys.readouterr().out


def test_impossible_tolerance_fails(tmp_path):
    cfg = _write(tmp_path, {"command": "verify", "algebra": "iso11", "tolerance": 1e-30})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 1
    report = json.loads((tmp_path / "cfg" / "report.json").read_text())
    failed = [c for c in report["checks"] if not c["passed"]]
    assert failed and all(c["tolerance"] == 1e-30 for c in failed)


@pytest.mark.parametrize("doc", [
    {"command": "verify"},
    {"command": "verify", "algebra": "su2"},
    {"command": "verify", "algebra": "iso11", "tolerance": -1},
    {"command": "verify", "algebra": "iso11", "tolerances": {"commutator": 0}},
    {"command": "ito", "algebra": "iso11"},  # command mismatch with the CLI argument below
    {"command": "charfunc", "algebra": "iso11", "sweep": {"start": 4.0, "stop": 5.0, "step": 0.1}},
])
def test_input_errors(tmp_path, doc):
    assert main(["verify" if doc["command"] != "charfunc" else "charfunc", "--config", _write(tmp_path, doc),
                 "--out", str(tmp_path)]) == 2


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["verify", "--config", str(p)]) == 2


def test_missing_config(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "nope.json")]) == 2


def test_dsl_config(tmp_path):
    (tmp_path / "osc.alg").write_text("algebra osc\ngenerators: a*ad ad one\ncentral: one\nunit: one\n"
                                      "vacuum: a=annihilator ad=creator one=neutral\n[a,ad] = one\n")
    cfg = _write(tmp_path, {"command": "ito", "dsl": "osc.alg"})
    assert main(["ito", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "cfg" / "ito_osc.txt").read_text() == "da dad = dt\n"


def test_env_output_override(tmp_path, monkeypatch):
    monkeypatch.setenv("NCALC_OUT", str(tmp_path / "env"))
    assert main(["ito", "--config", "ito-all"]) == 0
    assert (tmp_path / "env" / "ito-all" / "ito_iso11.txt").exists()


def test_fixture_compare_bundled(tmp_path):
    assert main(["ito", "--config", "ito-all", "--out", str(tmp_path), "--fixtures", "compare"]) == 0


def test_fixture_record_compare_and_drift(tmp_path):
    cfg_dir = tmp_path / "cfg"
    cfg_dir.mkdir()
    cfg = str(cfg_dir / "ito-mini.json")
    Path(cfg).write_text(json.dumps({"command": "ito", "algebras": ["iso11"]}))
    out = str(tmp_path / "out")
    assert main(["ito", "--config", cfg, "--out", out, "--fixtures", "record"]) == 0
    # recording again needs --force
    assert main(["ito", "--config", cfg, "--out", out, "--fixtures", "record"]) == 2
    assert main(["ito", "--config", cfg, "--out", out, "--fixtures", "record", "--force"]) == 0
    assert main(["ito", "--config", cfg, "--out", out, "--fixtures", "compare"]) == 0
    fixture = cfg_dir / "fixtures" / "ito-mini" / "ito_iso11.txt"
    fixture.write_text(fixture.read_text().replace("d𝕴 dA₊ = -1/2", "d𝕴 dA₊ = 1/2"))
    assert main(["ito", "--config", cfg, "--out", out, "--fixtures", "compare"]) == 1
    report = json.loads((tmp_path / "out" / "ito-mini" / "report.json").read_text())
    drift = [c["detail"] for c in report["checks"] if not c["passed"]]
    assert any("(d𝕴, dA₊)" in d for d in drift)


def test_missing_fixture_is_input_error(tmp_path):
    cfg = _write(tmp_path, {"command": "ito", "algebras": ["iso11"]}, "fresh.json")
    assert main(["ito", "--config", cfg, "--out", str(tmp_path), "--fixtures", "compare"]) == 2


def test_charfunc_fixture_survives_grid_refinement(tmp_path):
    doc = json.loads((SCENARIO_DIR / "charfunc-iso11.json").read_text())
    doc["grid"] = {"N": [1024]}
    shutil.copytree(SCENARIO_DIR / "fixtures", tmp_path / "fixtures")
    cfg = _write(tmp_path, doc, "charfunc-iso11.json")
    assert main(["charfunc", "--config", cfg, "--out", str(tmp_path / "out"), "--fixtures", "compare"]) == 0


def test_charfunc_csv_format(tmp_path):
    assert main(["charfunc", "--config", "charfunc-iso11", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "charfunc-iso11" / "charfunc_iso11.csv").read_text().splitlines()
    assert lines[0] == "u,C"
    assert len(lines) == 122
    u, c = lines[1].split(",")
    assert float(u) == -3.0 and len(c.replace("-", "").replace(".", "").lstrip("0")) >= 16


def test_empty_csv_rejected():
    with pytest.raises(InputError):
        csv_text(["u", "C"], [])


def test_reports_are_deterministic(tmp_path):
    for k in (1, 2):
        assert main(["type2", "--config", "type2-demo", "--out", str(tmp_path / str(k))]) == 0
    a, b = tmp_path / "1" / "type2-demo", tmp_path / "2" / "type2-demo"
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f
