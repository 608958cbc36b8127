"""Config ingestion, canonical report emission, CLI contract."""

import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from fibrum import (canonical_text, emit_report, load_config,
                    run_scenario)
from fibrum.errors import ConfigError


def _write(tmp_path: Path, tree) -> Path:
    p = tmp_path / "config.json"
    p.write_text(json.dumps(tree), encoding="utf-8")
    return p


def test_minimal_config_gets_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, {"bundle_name": "flat",
                                        "scenario": "verify-all"}))
    assert cfg.step == 1e-3
    assert cfg.seed == 42
    assert cfg.output_path is None
    assert cfg.tolerance("projector_algebra") == 1e-12


def test_unknown_bundle_rejected(tmp_path):
    with pytest.raises(ConfigError) as err:
        load_config(_write(tmp_path, {"bundle_name": "torus",
                                      "scenario": "verify-all"}))
    assert err.value.field == "bundle_name"


def test_unknown_scenario_and_keys_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, {"bundle_name": "flat",
                                      "scenario": "fly-me-to-the-moon"}))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, {"bundle_name": "flat",
                                      "scenario": "verify-all",
                                      "extra": 1}))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, {"bundle_name": "flat",
                                      "scenario": "verify-all",
                                      "scenario_params": {"samples": 3}}))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, {"bundle_name": "flat",
                                      "scenario": "verify-all",
                                      "tolerances": {"no_such_check": 1.0}}))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, {"bundle_name": "flat",
                                      "scenario": "verify-all",
                                      "integrator": {"step": -1.0}}))


def test_parse_error_reports_location(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"bundle_name": "flat",\n  scenario:}', encoding="utf-8")
    with pytest.raises(ConfigError) as err:
        load_config(p)
    assert "line 2" in str(err.value)


def test_overrides_win(tmp_path):
    p = _write(tmp_path, {"bundle_name": "flat", "scenario": "theorem41",
                          "scenario_params": {"seed": 7, "samples": 2}})
    cfg = load_config(p, seed_override=99, step_override=5e-4,
                      out_override="x.json")
    assert cfg.seed == 99
    assert cfg.step == 5e-4
    assert cfg.output_path == "x.json"
    cfg = load_config(p)
    assert cfg.seed == 7


def test_custom_christoffel_roundtrip(tmp_path):
    # coefficients survive the trip config -> bundle -> evaluation
    p = _write(tmp_path, {
        "bundle_name": "tm-custom-christoffel",
        "scenario": "curvature-table",
        "bundle_params": {"G_1_12": 1.0},
        "scenario_params": {"samples": 2},
    })
    cfg = load_config(p)
    from fibrum import build_connection
    conn = build_connection(cfg.bundle_name, cfg.bundle_params)
    got = conn.gamma([0.0, 0.0], [0.0, 1.0], [1.0, 0.0])
    assert float(got[0]) == 1.0 and float(got[1]) == 0.0
    report = run_scenario(cfg)
    assert report.scenario["bundle_params"] == {"G_1_12": 1.0}


def test_canonical_text_fixed_float_format():
    tree = {"a": 0.1, "b": [1.0, 2, True, None], "c": {"d": "x"},
            "e": float("inf")}
    text = canonical_text(tree)
    assert '"a": 0.10000000000000001' in text
    assert "null" in text  # non-finite reals become null
    json.loads(text)  # stays valid JSON


def test_emit_report_deterministic(tmp_path):
    cfg = load_config({"bundle_name": "nonlinear-demo",
                       "scenario": "theorem41",
                       "scenario_params": {"samples": 3}})
    r1 = run_scenario(cfg)
    r2 = run_scenario(cfg)
    p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
    emit_report(r1, p1)
    emit_report(r2, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_report_shape_and_failure_semantics():
    cfg = load_config({"bundle_name": "flat", "scenario": "theorem41",
                       "scenario_params": {"samples": 3}})
    report = run_scenario(cfg)
    tree = report.to_tree()
    assert set(tree) == {"scenario", "environment", "sign_convention",
                         "checks", "table", "overall_pass"}
    names = [row["check_name"] for row in tree["checks"]]
    assert "curvature_routes_equality" in names
    for row in tree["checks"]:
        assert set(row) == {"check_name", "samples", "max_residual",
                            "tolerance", "pass", "note"}
        assert row["pass"] == (row["max_residual"] <= row["tolerance"])
    assert tree["overall_pass"] == all(r["pass"] for r in tree["checks"])
    # the commutator-route row fails for honest reasons; everything else holds
    fails = {r["check_name"] for r in tree["checks"] if not r["pass"]}
    assert fails == {"curvature_routes_equality"}


def test_empty_checks_report_passes():
    from fibrum.scenarios import VerificationReport
    rep = VerificationReport(scenario={}, environment={}, sign_convention="")
    assert rep.overall_pass
    assert rep.to_tree()["overall_pass"] is True


def test_scenarios_deterministic_rows():
    cfg = load_config({"bundle_name": "nonlinear-demo",
                       "scenario": "curvature-table",
                       "scenario_params": {"samples": 4, "seed": 11}})
    t1 = run_scenario(cfg).to_tree()
    t2 = run_scenario(cfg).to_tree()
    assert canonical_text(t1) == canonical_text(t2)


def test_geodesic_scenario_results():
    cfg = load_config({"bundle_name": "sphere", "scenario": "geodesic",
                       "scenario_params": {"x0": [1.5707963267948966, 0.0],
                                           "v0": [0.0, 1.0], "T": 1.0}})
    report = run_scenario(cfg)
    assert report.overall_pass
    assert abs(report.results["x_final"][0] - math.pi / 2) < 1e-10
    assert abs(report.results["x_final"][1] - 1.0) < 1e-10


def test_holonomy_scenario_sphere():
    cfg = load_config({"bundle_name": "sphere", "scenario": "holonomy"})
    report = run_scenario(cfg)
    assert report.overall_pass
    assert abs(report.results["rotation_angle"] - math.pi) < 1e-4


def test_transport_scenario_flat():
    cfg = load_config({"bundle_name": "flat", "scenario": "transport"})
    report = run_scenario(cfg)
    assert report.overall_pass
    assert report.results["roundtrip_residual"] <= 1e-8


# -- CLI ----------------------------------------------------------------------

def _cli(*args, env=None):
    import os
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run([sys.executable, "-m", "fibrum.cli", *args],
                          capture_output=True, text=True, env=full_env)


def test_cli_run_reads_stdin(tmp_path):
    import os
    rep = tmp_path / "rep.json"
    cfg = json.dumps({"bundle_name": "nonlinear-demo",
                      "scenario": "curvature-table",
                      "scenario_params": {"samples": 1},
                      "output_path": str(rep)})
    out = subprocess.run([sys.executable, "-m", "fibrum.cli", "run", "-",
                          "--quiet"], input=cfg, capture_output=True,
                         text=True, env=dict(os.environ))
    assert out.returncode == 0
    assert rep.exists()


def test_cli_catalog_lists_bundles():
    out = _cli("catalog")
    assert out.returncode == 0
    for name in ("flat", "sphere", "nonlinear-demo", "tm-custom-christoffel"):
        assert name in out.stdout


def test_cli_config_error_exit_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    out = _cli("run", str(p))
    assert out.returncode == 2
    assert "config error" in out.stderr
    out = _cli("verify", "torus")
    assert out.returncode == 2


def test_cli_run_scenario_and_exit_codes(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "bundle_name": "sphere", "scenario": "holonomy",
        "output_path": str(tmp_path / "rep.json")}), encoding="utf-8")
    out = _cli("run", str(cfg))
    assert out.returncode == 0
    assert (tmp_path / "rep.json").exists()
    tree = json.loads((tmp_path / "rep.json").read_text())
    assert tree["overall_pass"] is True


def test_cli_seed_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "bundle_name": "nonlinear-demo", "scenario": "curvature-table",
        "scenario_params": {"samples": 2},
        "output_path": str(tmp_path / "rep.json")}), encoding="utf-8")
    _cli("run", str(cfg), env={"FIBRUM_SEED": "5"})
    env_tree = json.loads((tmp_path / "rep.json").read_text())
    assert env_tree["environment"]["seed"] == 5
    _cli("run", str(cfg), "--seed", "9", env={"FIBRUM_SEED": "5"})
    flag_tree = json.loads((tmp_path / "rep.json").read_text())
    assert flag_tree["environment"]["seed"] == 9


def test_cli_bad_tolerance_fails_named_check(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "bundle_name": "flat", "scenario": "curvature-table",
        "scenario_params": {"samples": 1},
        "tolerances": {"catalog_integrity": -1.0},
        "output_path": str(tmp_path / "rep.json")}), encoding="utf-8")
    out = _cli("run", str(cfg))
    assert out.returncode == 1
    tree = json.loads((tmp_path / "rep.json").read_text())
    bad = [r for r in tree["checks"] if not r["pass"]]
    assert [r["check_name"] for r in bad] == ["catalog_integrity"]
