"""CLI contracts: subcommands, exit codes, output formats."""

import json

import pytest
from click.testing import CliRunner

from csibreath.cli import main
from test_dataio import SCENARIO_TEXT


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def scenario_file(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(SCENARIO_TEXT)
    return path


def _simulate(runner, scenario_file, tmp_path, truth=True):
    rec = tmp_path / "rec.csir"
    truth_path = tmp_path / "truth.txt"
    args = ["simulate", "--scenario", str(scenario_file), "--out", str(rec)]
    if truth:
        args += ["--truth-out", str(truth_path)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return rec, truth_path


def test_simulate_writes_files_and_reports_dimensions(runner, scenario_file,
                                                      tmp_path):
    rec, truth = _simulate(runner, scenario_file, tmp_path)
    assert rec.exists() and truth.exists()
    result = runner.invoke(main, ["simulate", "--scenario",
                                  str(scenario_file), "--out", str(rec)])
    assert "snapshots=297" in result.output
    assert "seed=7" in result.output


def test_simulate_missing_scenario_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["simulate", "--scenario",
                                  str(tmp_path / "nope.cfg"),
                                  "--out", str(tmp_path / "rec.csir")])
    assert result.exit_code == 2
    assert "scenario not found" in result.output


def test_simulate_is_reproducible(runner, scenario_file, tmp_path):
    a = tmp_path / "a.csir"
    b = tmp_path / "b.csir"
    for out in (a, b):
        result = runner.invoke(main, ["simulate", "--scenario",
                                      str(scenario_file), "--out", str(out)])
        assert result.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_parse_error_exits_2_with_line(runner, tmp_path):
    path = tmp_path / "broken.cfg"
    path.write_text("[radio]\nsnapshots == 297\n")
    result = runner.invoke(main, ["simulate", "--scenario", str(path),
                                  "--out", str(tmp_path / "rec.csir")])
    assert result.exit_code == 2
    assert "line 2" in result.output


def test_estimate_table(runner, scenario_file, tmp_path):
    rec, _ = _simulate(runner, scenario_file, tmp_path)
    result = runner.invoke(main, ["estimate", "--in", str(rec),
                                  "--system", "complexbeat-csi-df"])
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert len(lines) == 2  # header + one 30 s window
    rate_bpm = float(lines[1].split()[1])
    assert abs(rate_bpm - 15.0) <= 0.6  # 0.25 Hz scenario


def test_estimate_unknown_system_exits_2(runner, scenario_file, tmp_path):
    rec, _ = _simulate(runner, scenario_file, tmp_path)
    result = runner.invoke(main, ["estimate", "--in", str(rec),
                                  "--system", "bogus"])
    assert result.exit_code == 2
    assert "phasebeat" in result.output  # usage error lists valid names


def test_estimate_json_lines_parse(runner, scenario_file, tmp_path):
    rec, _ = _simulate(runner, scenario_file, tmp_path)
    result = runner.invoke(main, ["estimate", "--in", str(rec),
                                  "--system", "phasebeat-boi-psd",
                                  "--json"])
    assert result.exit_code == 0, result.output
    for line in result.output.strip().splitlines():
        record = json.loads(line)
        assert record["system"] == "phasebeat-boi-psd"
        assert {"window_start_s", "rate_bpm", "score"} <= set(record)


def test_evaluate_writes_report(runner, scenario_file, tmp_path):
    rec, truth = _simulate(runner, scenario_file, tmp_path)
    out = tmp_path / "report.csv"
    result = runner.invoke(main, [
        "evaluate", "--in", str(rec), "--truth", str(truth),
        "--systems", "complexbeat-csi-df,phasebeat-boi-psd",
        "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()
    assert result.output.count("windows=") == 2


def test_evaluate_all_six_systems(runner, scenario_file, tmp_path):
    rec, truth = _simulate(runner, scenario_file, tmp_path)
    out = tmp_path / "report.csv"
    result = runner.invoke(main, [
        "evaluate", "--in", str(rec), "--truth", str(truth),
        "--systems", ",".join(
            ["phasebeat", "phasebeat-mad-psd", "phasebeat-boi-psd",
             "complexbeat-cir", "complexbeat-csi", "complexbeat-csi-df"]),
        "--out", str(out)])
    assert result.exit_code == 0, result.output
    summary_lines = [l for l in result.output.splitlines()
                     if "windows=" in l]
    assert len(summary_lines) == 6


def test_evaluate_truth_gap_exits_2(runner, scenario_file, tmp_path):
    rec, _ = _simulate(runner, scenario_file, tmp_path)
    gap_truth = tmp_path / "short.txt"
    gap_truth.write_text("0.0 0.25\n5.0 0.25\n")
    result = runner.invoke(main, [
        "evaluate", "--in", str(rec), "--truth", str(gap_truth),
        "--systems", "complexbeat-csi-df",
        "--out", str(tmp_path / "r.csv")])
    assert result.exit_code == 2
    assert "[0 s, 5 s]" in result.output


def test_evaluate_unknown_system_exits_2(runner, scenario_file, tmp_path):
    rec, truth = _simulate(runner, scenario_file, tmp_path)
    result = runner.invoke(main, [
        "evaluate", "--in", str(rec), "--truth", str(truth),
        "--systems", "complexbeat-csi-df,nope",
        "--out", str(tmp_path / "r.csv")])
    assert result.exit_code == 2
    assert "unknown system" in result.output


def test_results_on_stdout_diagnostics_on_stderr(runner, scenario_file,
                                                 tmp_path):
    rec, truth = _simulate(runner, scenario_file, tmp_path)
    out = tmp_path / "report.csv"
    result = runner.invoke(main, [
        "evaluate", "--in", str(rec), "--truth", str(truth),
        "--systems", "complexbeat-csi-df", "--out", str(out)])
    assert "windows=" in result.stdout
    assert "wrote" in result.stderr and "wrote" not in result.stdout


def test_systems_subcommand_lists_all(runner):
    result = runner.invoke(main, ["systems"])
    assert result.exit_code == 0
    for name in ("phasebeat", "complexbeat-csi-df"):
        assert name in result.output
    assert "delay_max_s = 5e-08" in result.output


def test_estimate_exits_1_when_windows_fail(runner, tmp_path):
    # A static noiseless channel passes the gate (constant phase
    # differences) but leaves the peak detector nothing to find.
    scenario = tmp_path / "static.cfg"
    scenario.write_text("""\
[radio]
snapshots = 297
tx = 1
rx = 2
subcarriers = 29
snapshot_rate_hz = 9.9
subcarrier_spacing_hz = 703125.0
carrier_freq_hz = 5.32e9

[path los]
attenuation = 1.0
delay_s = 1.5e-8
""")
    rec = tmp_path / "static.csir"
    assert runner.invoke(main, ["simulate", "--scenario", str(scenario),
                                "--out", str(rec)]).exit_code == 0
    result = runner.invoke(main, ["estimate", "--in", str(rec),
                                  "--system", "phasebeat"])
    assert result.exit_code == 1
    assert "failed" in result.stdout
    assert "no estimate" in result.stderr
