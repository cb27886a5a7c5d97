import json
import subprocess
import sys

import pytest
from conftest import hypersurface, surface_points

from riemext.cli import Scenario, ScenarioError, dumps, main, run, shipped_scenarios
from riemext.hypersurface import acm_sample

SHIPPED = shipped_scenarios()


def write(tmp_path, data, name="sc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data, encoding="utf-8")
    return str(path)


def base():
    return json.loads(SHIPPED["FLAT2"].read_text(encoding="utf-8"))


def test_shipped_scenarios_present():
    assert set(SHIPPED) == {"FLAT2", "POLY2", "PROD3"}
    for path in SHIPPED.values():
        sc = Scenario.load(path)
        assert sc.has_hypersurface and sc.prm.b == 4 * sc.prm.a**2


@pytest.mark.parametrize(
    "patch",
    [
        {"manifold": None},
        {"manifold": {"dim": 2, "gamma": {"1,1": "x1"}}},
        {"manifold": {"dim": 2, "gamma": {"1,1,1": "x3"}}},
        {"manifold": {"dim": 2, "gamma": {"1,1,1": "x1 +"}}},
        {"manifold": {"dim": 1}},
        {"params": {"a": 0.0, "b": 1.0}},
        {"xi": ["1"]},
        {"sampling": {"seed": -1}},
        {"sampling": {"x_box": [[1, 0], [0, 1]]}},
        {"sampling": {"count": 0}},
    ],
)
def test_invalid_scenarios(tmp_path, patch):
    data = base()
    for k, v in patch.items():
        if v is None:
            del data[k]
        else:
            data[k] = v
    with pytest.raises(ScenarioError):
        Scenario.load(write(tmp_path, data))
    assert main(["validate", write(tmp_path, data), "--quiet"]) == 1


def test_malformed_json_position(tmp_path, capsys):
    path = write(tmp_path, '{\n  "manifold": {"dim": 2,}\n}')
    assert main(["validate", path]) == 1
    err = capsys.readouterr().err
    assert "line 2 column" in err


def test_missing_file(capsys):
    assert main(["validate", "/nonexistent/scenario.json"]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_flat_para_kaehler(capsys):
    assert main(["para-hermitian", str(SHIPPED["FLAT2"]), "--points", "10"]) == 0
    assert "para-Kähler: true" in capsys.readouterr().out


def test_poly_almost_para_kaehler(capsys):
    assert main(["para-hermitian", str(SHIPPED["POLY2"]), "--points", "10"]) == 0
    out = capsys.readouterr().out
    assert "almost para-Kähler: true" in out
    assert "\n  para-Kähler: false" in out


def test_prod_k_paracontact(capsys):
    assert main(["hypersurface", str(SHIPPED["PROD3"]), "--points", "10"]) == 0
    assert "K-paracontact: true" in capsys.readouterr().out


def test_non_4a2_scenario_still_passes(tmp_path):
    data = json.loads(SHIPPED["PROD3"].read_text(encoding="utf-8"))
    data["params"]["b"] = 2.0
    reports = run("hypersurface", write(tmp_path, data), points=10)
    assert reports[0].passed
    assert reports[0].verdicts["K-paracontact"] is False


def test_json_deterministic(tmp_path):
    out1, out2, out3 = (tmp_path / f"r{i}.json" for i in range(3))
    sc = str(SHIPPED["POLY2"])
    assert main(["all", sc, "--points", "5", "--json", str(out1), "--quiet"]) == 0
    assert main(["all", sc, "--points", "5", "--json", str(out2), "--quiet"]) == 0
    assert main(["all", sc, "--points", "5", "--seed", "7", "--json", str(out3), "--quiet"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() != out3.read_bytes()
    doc = json.loads(out1.read_text(encoding="utf-8"))
    assert [r["command"] for r in doc["reports"]] == ["validate", "para-hermitian", "hypersurface"]
    assert list(doc["reports"][0]) == ["command", "scenario", "environment", "passed", "checks", "verdicts", "info"]
    assert all("anchor" in c for r in doc["reports"] for c in r["checks"])


def test_check_failure_exit_code():
    assert main(["hypersurface", str(SHIPPED["POLY2"]), "--points", "3", "--tol", "1e-30", "--quiet"]) == 2


def test_non_parallel_xi_fails_validation(tmp_path):
    data = json.loads(SHIPPED["POLY2"].read_text(encoding="utf-8"))
    data["xi"] = ["1", "0"]
    assert main(["validate", write(tmp_path, data), "--points", "3", "--quiet"]) == 2


def test_hypersurface_needs_data(tmp_path):
    data = base()
    del data["f"]
    path = write(tmp_path, data)
    assert main(["hypersurface", path, "--quiet"]) == 1
    reports = run("all", path, points=3)
    assert [r.command for r in reports] == ["validate", "para-hermitian"]


def test_hypersurface_needs_positive_b(tmp_path):
    data = base()
    data["params"]["b"] = 0.0
    assert main(["hypersurface", write(tmp_path, data), "--quiet"]) == 1


@pytest.mark.parametrize("flags", [["--seed", "-3"], ["--tol", "0"], ["--points", "0"]])
def test_bad_flags(flags):
    assert main(["validate", str(SHIPPED["FLAT2"]), "--quiet", *flags]) == 1


def test_classify_subcommand(tmp_path, capsys):
    spec = hypersurface("FLAT2")
    sample = acm_sample(spec, surface_points(spec, 1)[0])
    path = write(tmp_path, sample.to_json(), "sample.json")
    out = tmp_path / "report.json"
    assert main(["classify", path, "--json", str(out)]) == 0
    out_text = capsys.readouterr().out
    assert "para-Sasakian: true" in out_text and "alpha-para-Sasakian: true" in out_text
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert "G5" in doc["reports"][0]["verdicts"]["classes"]
    assert main(["classify", write(tmp_path, {"m": 3}, "bad.json"), "--quiet"]) == 1


def test_dumps_format():
    text = dumps({"b": 0.1, "a": [1, 2.0, float("nan")], "c": {"x": True, "y": None}})
    assert text.index('"b"') < text.index('"a"')
    assert "0.10000000000000001" in text
    assert "[1, 2.0, null]" in text
    assert json.loads(text)["c"] == {"x": True, "y": None}


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "riemext", "validate", str(SHIPPED["FLAT2"]), "--points", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "result: pass" in proc.stdout
