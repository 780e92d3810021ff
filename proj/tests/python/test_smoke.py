import json
import math
from pathlib import Path

import pytest

import mgres

DATA = Path(__file__).resolve().parents[2] / "data"
SIX = DATA / "scenarios" / "six_bus.json"


def test_solve_lp_small():
    # max x + y with x + 2y <= 4, 3x + y <= 6
    r = mgres.solve_lp([-1.0, -1.0], [[1.0, 2.0], [3.0, 1.0]], ["<=", "<="], [4.0, 6.0], [0.0, 0.0], [10.0, 10.0])
    assert r.status == "optimal"
    assert r.objective == pytest.approx(-2.8)
    assert r.x == pytest.approx([1.6, 1.2])


def test_solve_lp_infeasible_has_certificate():
    r = mgres.solve_lp([1.0], [[1.0], [1.0]], [">=", "<="], [3.0, 2.0], [0.0], [10.0])
    assert r.status == "infeasible"
    assert r.certificate_rows


def test_solve_lp_rejects_bad_shapes():
    with pytest.raises(ValueError):
        mgres.solve_lp([1.0, 1.0], [[1.0]], ["<="], [1.0], [0.0, 0.0], [1.0, 1.0])


def test_load_scenario():
    sc = mgres.load_scenario(str(SIX))
    assert sc.name == "six-bus example"
    assert sc.steps == 4
    assert sc.buses[0] == "src"
    assert len(sc.axes) == 3
    assert mgres.load_scenario(str(SIX), seed=9).seed == 9


def test_bad_scenario_raises():
    with pytest.raises(mgres.InputError):
        mgres.load_scenario(str(DATA / "scenarios" / "nope.json"))


def test_baseline_and_robust():
    base = mgres.baseline(SIX)
    rob = mgres.robust(SIX)
    assert base["status"] == "optimal"
    assert rob["status"] == "optimal"
    assert rob["objective"] >= base["objective"] - 1e-9
    assert len(base["soc_wh"]["es1"]) == 5


def test_hsll_keeps_diesel_off():
    d = mgres.baseline(DATA / "scenarios" / "hsll.json")
    assert all(p == 0.0 for g in d["dg"] for p in g["p_w"])


def test_advset_and_simulate():
    poly = mgres.advset(SIX)
    assert len(poly["axes"]) == 3
    for a in poly["axes"]:
        assert a["alpha_w"] > 0
        assert a["certified"]
    assert len(poly["vertices"]) == 4
    s = mgres.simulate(SIX)
    assert s["total"] == 0
    assert s["trajectory_csv"].startswith("step,minute,")


def test_cli_round_trip(tmp_path):
    out = tmp_path / "run"
    rc, stdout, _ = mgres.run_cli(["baseline", str(SIX), "--out", str(out)])
    assert rc == 0
    assert "optimal" in stdout
    manifest = json.loads((out / "manifest.json").read_text())
    assert {o["path"] for o in manifest["outputs"]} >= {"dispatch.json", "aggregate.csv"}
    rc, _, _ = mgres.run_cli(["validate", str(out / "manifest.json")])
    assert rc == 0


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1,')
    rc, _, err = mgres.run_cli(["baseline", str(bad), "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "byte" in err
