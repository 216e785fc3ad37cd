import json
import math

import pytest

from logineq.cli import ScenarioConfig, UsageError, build_parser, main, run_scenario


def run(argv):
    return main(argv)


def test_verify_wls_writes_reports(tmp_path):
    out = tmp_path / "a"
    code = run(["verify", "--ineq", "wls", "--weight", "g1", "--N", "3",
                "--p", "2", "--r", "4", "--out", str(out)])
    assert code == 0
    payload = json.loads((out / "verify_wls.json").read_text())
    rec = payload["records"][0]
    assert rec["residual"] >= -max(rec["error_budget"], 1e-12)
    assert rec["config_hash"] == payload["config_hash"]
    csv_lines = (out / "verify_wls.csv").read_text().splitlines()
    assert csv_lines[0].startswith("schema_version,kind,lhs,rhs,residual")
    assert len(csv_lines) == 2


def test_verify_rejects_bad_window(tmp_path, capsys):
    code = run(["verify", "--ineq", "wls", "--weight", "g1", "--N", "3",
                "--p", "2", "--r", "9", "--out", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "violates p < r <= p*" in err


def test_log_hardy_window_policy(tmp_path, capsys):
    args = ["verify", "--ineq", "log-hardy", "--a", "0.6", "--N", "3", "--p",
            "2", "--set", "point", "--out", str(tmp_path / "w")]
    assert run(args) == 0
    assert "outside the admissible window" in capsys.readouterr().err
    assert run(args + ["--window-policy", "fail"]) == 1


def test_log_hardy_report_written(tmp_path):
    out = tmp_path / "lh"
    assert run(["verify", "--ineq", "log-hardy", "--a", "0.0", "--N", "3",
                "--p", "2", "--set", "point", "--out", str(out)]) == 0
    payload = json.loads((out / "verify_log-hardy.json").read_text())
    assert payload["records"][0]["kind"] == "log-hardy-first"


def test_mazya_command(tmp_path):
    out = tmp_path / "m"
    assert run(["verify", "--ineq", "mazya", "--weight", "g1", "--N", "3",
                "--p", "2", "--r", "4", "--out", str(out)]) == 0
    payload = json.loads((out / "mazya.json").read_text())
    assert payload["lower_bound"] == pytest.approx(1 / (8 * math.pi), rel=1e-9)
    assert payload["C_H"] == 4.0
    assert (out / "mazya_ratios.csv").exists()


def test_capacity_command(tmp_path):
    out = tmp_path / "c"
    assert run(["capacity", "--N", "3", "--p", "2", "--grid-nodes", "2048",
                "--out", str(out)]) == 0
    payload = json.loads((out / "capacity.json").read_text())
    assert abs(payload["relative_gap"]) <= 0.02
    assert payload["convergence"] == sorted(payload["convergence"], reverse=True)


def test_assouad_command(tmp_path):
    out = tmp_path / "s"
    assert run(["assouad", "--set", "segment", "--N", "3", "--out", str(out)]) == 0
    payload = json.loads((out / "assouad.json").read_text())
    assert payload["dim"] == pytest.approx(1.0, abs=0.1)
    assert payload["porosity_alpha"] > 0
    table = (out / "assouad_table.csv").read_text().splitlines()
    assert table[0] == "base_point,R,r,eta_lower,eta_upper"


def test_outputs_byte_identical(tmp_path):
    args = ["verify", "--ineq", "hardy", "--N", "3", "--p", "2", "--seed", "7"]
    run(args + ["--out", str(tmp_path / "x1")])
    run(args + ["--out", str(tmp_path / "x2")])
    for name in ("verify_hardy.json", "verify_hardy.csv"):
        b1 = (tmp_path / "x1" / name).read_bytes()
        b2 = (tmp_path / "x2" / name).read_bytes()
        assert b1 == b2


def test_sweep_from_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "ineq": "wls", "weight": "g1", "N": 3, "p": 2.0, "grid_nodes": 1024,
        "sweep": [{"r": 4.0}, {"r": 6.0}, {"p": 2.5, "r": 8.0}]}))
    out = tmp_path / "sw"
    assert run(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "sweep_summary.csv").read_text().splitlines()
    assert lines[0] == "index,exit_code,config_hash"
    assert len(lines) == 4
    assert all(line.split(",")[1] == "0" for line in lines[1:])


def test_sweep_requires_points(tmp_path):
    cfg = ScenarioConfig(command="sweep", out=str(tmp_path))
    with pytest.raises(UsageError):
        run_scenario(cfg)


def test_unknown_weight_is_usage_error(tmp_path):
    assert run(["verify", "--ineq", "wls", "--weight", "nope", "--N", "3",
                "--p", "2", "--r", "4", "--out", str(tmp_path)]) == 2


def test_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ineq": "hardy", "N": 3, "p": 2.0}))
    out = tmp_path / "o"
    assert run(["verify", "--config", str(cfg), "--p", "1.5",
                "--out", str(out)]) == 0
    payload = json.loads((out / "verify_hardy.json").read_text())
    assert payload["config"]["p"] == 1.5


def test_parser_covers_documented_flags():
    ap = build_parser()
    ns = ap.parse_args(["verify", "--ineq", "wls", "--weight", "g1", "--set",
                        "point", "--N", "3", "--p", "2", "--r", "4", "--a",
                        "0.1", "--gamma", "3", "--grid-nodes", "128", "--rmax",
                        "10", "--seed", "1", "--out", "x"])
    assert ns.command == "verify" and ns.grid_nodes == 128
