import json

import pytest

import helpers
from flownet.cli import main


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_example1_passes(capsys):
    code, out, _ = run(capsys, ["validate", "--scenario", "example1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert payload["stochastic"]["passed"] is True


def test_validate_example2_reports_three_patterns(capsys):
    code, out, _ = run(capsys, ["validate", "--scenario", "example2"])
    assert code == 0
    payload = json.loads(out)
    assert payload["support"]["distinct_patterns"] == 3


def test_validate_bad_column_sum_fails(tmp_path, capsys):
    doc = helpers.base_flow_scenario()
    doc["weights"]["1,1"] = "0.9"
    path = helpers.write_scenario(tmp_path, doc)
    code, out, _ = run(capsys, ["validate", "--scenario", str(path)])
    assert code == 1
    payload = json.loads(out)
    assert payload["stochastic"]["checks"][1]["witness_value"] == pytest.approx(0.9)


def test_simulate_writes_field_and_mass_summary(tmp_path, capsys):
    out_path = tmp_path / "field.csv"
    code, out, _ = run(
        capsys,
        ["simulate", "--scenario", "example1", "--t-end", "5.0", "--out", str(out_path)],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["rows"] == 6 * 400
    assert payload["relative_drift"] <= 1e-9
    lines = out_path.read_text().strip().splitlines()
    assert len(lines) == 1 + 6 * 400


def test_simulate_example2(tmp_path, capsys):
    out_path = tmp_path / "field.csv"
    code, out, _ = run(
        capsys,
        ["simulate", "--scenario", "example2", "--t-end", "5.0", "--out", str(out_path)],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["rows"] == 10 * 400
    assert payload["relative_drift"] <= 1e-9
    assert len(out_path.read_text().strip().splitlines()) == 1 + 10 * 400


def test_simulate_at_start_time_returns_initial(tmp_path, capsys):
    out_path = tmp_path / "field.csv"
    code, out, _ = run(
        capsys,
        ["simulate", "--scenario", "example1", "--t-end", "0.0", "--out", str(out_path)],
    )
    assert code == 0
    values = {float(line.split(",")[2]) for line in out_path.read_text().splitlines()[1:]}
    assert values == {1.0}


def test_simulate_rejects_past_t_end(tmp_path, capsys):
    code, _, err = run(
        capsys,
        ["simulate", "--scenario", "example1", "--t-end", "-1.0",
         "--out", str(tmp_path / "x.csv")],
    )
    assert code == 2
    assert "precedes" in err


def test_period_example1(capsys):
    code, out, _ = run(capsys, ["period", "--scenario", "example1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["tau"] == 1
    assert payload["shortcut_applicable"] is True
    assert payload["shortcut_tau"] == 1


def test_period_example2(capsys):
    code, out, _ = run(capsys, ["period", "--scenario", "example2"])
    assert code == 0
    payload = json.loads(out)
    assert payload["tau"] == 2
    assert payload["shortcut_applicable"] is False
    assert len(payload["distinct_patterns"]) == 3


def test_period_single_cycle(tmp_path, capsys):
    doc = {
        "graph": {"n": 4, "edges": [[1, 2], [2, 3], [3, 4], [4, 1]]},
        "mode": "flow",
        "weights": {f"{i},{i}": "1" for i in range(1, 5)},
        "initial": {str(j): "1" for j in range(1, 5)},
    }
    path = helpers.write_scenario(tmp_path, doc)
    code, out, _ = run(capsys, ["period", "--scenario", str(path)])
    assert code == 0
    assert json.loads(out)["tau"] == 4


def test_converge_writes_trace(tmp_path, capsys):
    out_path = tmp_path / "trace.csv"
    code, out, _ = run(
        capsys,
        ["converge", "--scenario", "example1", "--tau", "1",
         "--horizon", "5", "--out", str(out_path)],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["tau"] == 1
    assert out_path.read_text().startswith("t,delta")


def test_converge_defaults_tau_to_computed_period(tmp_path, capsys):
    out_path = tmp_path / "trace.csv"
    code, out, _ = run(
        capsys,
        ["converge", "--scenario", "example2", "--horizon", "6",
         "--stride", "2", "--out", str(out_path)],
    )
    assert code == 0
    assert json.loads(out)["tau"] == 2


def test_converge_wrong_period_is_diagnostic_not_failure(tmp_path, capsys):
    out_path = tmp_path / "trace.csv"
    code, out, _ = run(
        capsys,
        ["converge", "--scenario", "example2", "--tau", "1",
         "--horizon", "10", "--stride", "2", "--out", str(out_path)],
    )
    assert code == 0  # non-convergence is reported, not an error
    assert json.loads(out)["min_delta"] > 1e-3


def test_converge_rejects_short_horizon(tmp_path, capsys):
    code, _, err = run(
        capsys,
        ["converge", "--scenario", "example1", "--tau", "3", "--horizon", "4",
         "--out", str(tmp_path / "t.csv")],
    )
    assert code == 1
    assert "horizon" in err


def test_commands_guard_on_invalid_scenario_unless_forced(tmp_path, capsys):
    doc = helpers.base_flow_scenario()
    doc["weights"]["1,1"] = "0.9"
    path = helpers.write_scenario(tmp_path, doc)
    out_path = tmp_path / "field.csv"
    code, _, err = run(
        capsys,
        ["simulate", "--scenario", str(path), "--t-end", "1.0", "--out", str(out_path)],
    )
    assert code == 1
    assert "validation" in err
    code, _, _ = run(
        capsys,
        ["simulate", "--scenario", str(path), "--t-end", "1.0",
         "--out", str(out_path), "--force"],
    )
    assert code == 0


def test_scenario_parse_error_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{")
    code, _, err = run(capsys, ["validate", "--scenario", str(path)])
    assert code == 2
    assert "error" in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_outputs_are_deterministic(tmp_path, capsys):
    _, out1, _ = run(capsys, ["period", "--scenario", "example2"])
    _, out2, _ = run(capsys, ["period", "--scenario", "example2"])
    assert out1 == out2

    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, ["simulate", "--scenario", "example2", "--t-end", "3.3", "--out", str(a)])
    run(capsys, ["simulate", "--scenario", "example2", "--t-end", "3.3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_grid_override(tmp_path, capsys):
    out_path = tmp_path / "field.csv"
    code, out, _ = run(
        capsys,
        ["simulate", "--scenario", "example1", "--t-end", "1.0",
         "--grid", "50", "--out", str(out_path)],
    )
    assert code == 0
    assert json.loads(out)["rows"] == 6 * 50


def test_tol_override_can_fail_a_passing_scenario(tmp_path, capsys):
    doc = helpers.base_flow_scenario()
    doc["weights"]["1,1"] = "1 - 0.000001"
    path = helpers.write_scenario(tmp_path, doc)
    code, _, _ = run(capsys, ["validate", "--scenario", str(path), "--tol", "1e-2"])
    assert code == 0
    code, _, _ = run(capsys, ["validate", "--scenario", str(path), "--tol", "1e-9"])
    assert code == 1


def test_validate_out_writes_json_copy(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, out, _ = run(
        capsys, ["validate", "--scenario", "example1", "--out", str(out_path)]
    )
    assert code == 0
    assert json.loads(out_path.read_text()) == json.loads(out)


def test_simulate_without_out_is_usage_error(capsys):
    code, _, err = run(capsys, ["simulate", "--scenario", "example1", "--t-end", "1.0"])
    assert code == 2
    assert "--out" in err
