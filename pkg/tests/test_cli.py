import json
import pathlib

import pytest

from gnslab import __version__, cli, policy

SCENARIOS = sorted((pathlib.Path(__file__).parent.parent / "scenarios").glob("*.json"))


def _write(tmp_path, obj, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _run(tmp_path, scenario, out="out", *extra):
    code = cli.main(["run", "--scenario", scenario, "--out", str(tmp_path / out), *extra])
    result = tmp_path / out / "result.json"
    return code, (json.loads(result.read_text()) if result.exists() else None)


def test_all_kinds_present():
    kinds = {json.loads(p.read_text())["kind"] for p in SCENARIOS}
    assert kinds == set(cli.RUNNERS)


@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_scenarios_succeed_and_are_deterministic(tmp_path, path):
    code, res = _run(tmp_path, str(path), "a")
    assert code == cli.EXIT_OK
    assert res["status"] == "ok"
    assert res["schema_version"] == cli.SCHEMA_VERSION
    assert res["policy"]["profile"] == "default"
    assert res["invariants"] and all(i["ok"] for i in res["invariants"])
    for inv in res["invariants"]:
        assert {"name", "residual", "tolerance", "ok"} <= set(inv)
    code2, _ = _run(tmp_path, str(path), "b")
    assert code2 == cli.EXIT_OK
    assert (tmp_path / "a" / "result.json").read_bytes() == (tmp_path / "b" / "result.json").read_bytes()


def test_chern_scenario_values(tmp_path):
    _, res = _run(tmp_path, str(SCENARIOS[[p.stem for p in SCENARIOS].index("chern")]))
    assert res["results"]["chern_E"] == 1
    assert res["results"]["chern_detH"] == -2


def test_ktheory_scenario_values(tmp_path):
    _, res = _run(tmp_path, str(SCENARIOS[[p.stem for p in SCENARIOS].index("ktheory")]))
    r = res["results"]
    assert r["pi1_U"] == "Q(delta)"
    assert r["pi1_Uomega"] == "Z x Q(delta)"
    assert r["membership"] == {"1/3": False, "3/8": True, "5/6": False}


def test_seed_override_changes_only_seed_dependent_output(tmp_path):
    path = str(SCENARIOS[[p.stem for p in SCENARIOS].index("metrics")])
    _run(tmp_path, path, "a", "--seed", "11")
    _run(tmp_path, path, "b", "--seed", "11")
    _, other = _run(tmp_path, path, "c", "--seed", "12")
    assert (tmp_path / "a" / "result.json").read_bytes() == (tmp_path / "b" / "result.json").read_bytes()
    assert other["seed"] == 12


def test_csv_and_svg_outputs(tmp_path):
    path = str(SCENARIOS[[p.stem for p in SCENARIOS].index("chern")])
    code, _ = _run(tmp_path, path, "out", "--csv", "--svg")
    assert code == cli.EXIT_OK
    names = {p.suffix for p in (tmp_path / "out").iterdir()}
    assert {".json", ".csv", ".svg"} <= names


def test_schema_error_exit_2(tmp_path, capsys):
    bad = _write(tmp_path, {"schema_version": 1, "kind": "chern", "seed": 0, "parameters": {"n_theta": "x"}})
    code, res = _run(tmp_path, bad)
    assert code == cli.EXIT_INPUT and res is None
    unknown = _write(tmp_path, {"schema_version": 1, "kind": "nope", "seed": 0, "parameters": {}}, "u.json")
    assert _run(tmp_path, unknown)[0] == cli.EXIT_INPUT
    notjson = tmp_path / "n.json"
    notjson.write_text("{")
    assert _run(tmp_path, str(notjson))[0] == cli.EXIT_INPUT
    assert _run(tmp_path, str(tmp_path / "missing.json"))[0] == cli.EXIT_INPUT


def test_coarse_grid_reports_invariant_violation(tmp_path):
    coarse = _write(tmp_path, {"schema_version": 1, "kind": "chern", "seed": 0,
                               "parameters": {"n_theta": 2, "n_phi": 3, "powers": [1]}})
    code, res = _run(tmp_path, coarse)
    assert code == cli.EXIT_INVARIANT
    assert res["status"] == "invariant_violation"
    assert any(not i["ok"] for i in res["invariants"])


def test_saturated_curvature_is_numeric_failure(tmp_path):
    s = _write(tmp_path, {"schema_version": 1, "kind": "chern", "seed": 0,
                          "parameters": {"n_theta": 1, "n_phi": 3, "powers": [3]}})
    code, res = _run(tmp_path, s)
    assert code == cli.EXIT_NUMERIC
    assert res["status"] == "numeric_error" and "CurvatureSaturated" in res["error"]


def test_version(capsys):
    assert cli.main(["--version"]) == cli.EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_bad_arguments():
    assert cli.main([]) == cli.EXIT_INPUT
    assert cli.main(["run"]) == cli.EXIT_INPUT


def test_tolerance_profile(tmp_path, monkeypatch):
    path = str(SCENARIOS[[p.stem for p in SCENARIOS].index("gns")])
    monkeypatch.setenv(policy.ENV_VAR, "strict")
    code, res = _run(tmp_path, path)
    assert code == cli.EXIT_OK
    assert res["policy"]["profile"] == "strict"
    assert res["policy"]["hermiticity"] == policy.PROFILES["strict"].hermiticity
    monkeypatch.setenv(policy.ENV_VAR, "sloppy")
    assert cli.main(["run", "--scenario", path, "--out", str(tmp_path / "x")]) == cli.EXIT_INPUT
