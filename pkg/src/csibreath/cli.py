"""Command-line interface.

Subcommands: ``simulate`` (scenario file -> recording + optional truth
track), ``estimate`` (per-window rates of one system), ``evaluate``
(multi-system comparison against a truth track) and ``systems`` (names and
resolved defaults).

Exit codes: 0 success, 1 at least one window failed to produce an estimate,
2 usage / config / IO errors.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click

from .dataio import (GroundTruthTrack, load_scenario, read_recording,
                     read_truth, sliding_windows, snapshot_count,
                     write_recording, write_truth)
from .evaluation import _map_windows, compare_systems
from .exceptions import EstimationError, ValidationError
from .simulate import simulate as _simulate_scenario
from .systems import SYSTEM_NAMES, SystemConfig, list_systems, run_window


def _cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EstimationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except (ValidationError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
    return wrapper


def _require_file(path: str, what: str) -> None:
    if not os.path.exists(path):
        raise ValidationError(f"{what} not found: {path}")


def _parse_system_list(spec: str) -> list[str]:
    names = [s.strip() for s in spec.split(",") if s.strip()]
    if not names:
        raise ValidationError("no systems given")
    unknown = [n for n in names if n not in SYSTEM_NAMES]
    if unknown:
        raise ValidationError(
            f"unknown system(s) {', '.join(unknown)}; valid names: "
            + ", ".join(SYSTEM_NAMES))
    return names


@click.group()
def main():
    """Breathing-rate estimation from WiFi CSI recordings."""


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              help="Scenario config file.")
@click.option("--out", "out_path", required=True,
              help="Output recording path.")
@click.option("--truth-out", "truth_path", default=None,
              help="Also write a constant-rate ground-truth track.")
@_cli_errors
def simulate(scenario_path, out_path, truth_path):
    """Synthesize a distorted CSI recording from a scenario file."""
    _require_file(scenario_path, "scenario")
    scenario = load_scenario(scenario_path)
    recording = _simulate_scenario(scenario)
    write_recording(recording, out_path)
    meta = recording.meta
    click.echo(
        f"wrote {out_path}: snapshots={meta.num_snapshots} "
        f"tx={meta.num_tx} rx={meta.num_rx} "
        f"subcarriers={meta.num_subcarriers} "
        f"rate={meta.snapshot_rate_hz:g}Hz "
        f"seed={scenario.distortion.rng_seed}")
    if truth_path is not None:
        rate = scenario.breathing_rate_hz
        if rate is None:
            raise ValidationError(
                "scenario has no dynamic path; no truth rate to write")
        track = GroundTruthTrack.constant(rate, meta.duration_s)
        write_truth(track, truth_path)
        click.echo(f"wrote {truth_path}: constant {rate:g} Hz")


@main.command()
@click.option("--in", "in_path", required=True, help="Recording path.")
@click.option("--system", required=True, type=click.Choice(SYSTEM_NAMES))
@click.option("--window", "window_s", default=30.0, show_default=True,
              help="Window length, seconds.")
@click.option("--step", "step_s", default=1.0, show_default=True,
              help="Window step, seconds.")
@click.option("--json", "as_json", is_flag=True,
              help="Line-delimited JSON records instead of a table.")
@click.option("--threads", default=None, type=int,
              help="Worker threads (default: available cores).")
@_cli_errors
def estimate(in_path, system, window_s, step_s, as_json, threads):
    """Per-window breathing-rate estimates for one system."""
    _require_file(in_path, "recording")
    recording = read_recording(in_path)
    cfg = SystemConfig(system)
    windows = sliding_windows(recording, window_s, step_s)
    f_s = recording.meta.snapshot_rate_hz
    hop = snapshot_count(f_s, step_s)

    def run_one(window):
        try:
            return run_window(window, cfg)
        except EstimationError as exc:
            return exc

    outcomes = _map_windows(run_one, windows, threads)
    failures = 0
    if not as_json:
        click.echo(f"{'start_s':>10} {'rate_bpm':>10} {'score':>12}")
    for k, outcome in enumerate(outcomes):
        start_s = k * hop / f_s
        if isinstance(outcome, EstimationError):
            failures += 1
            rate_field, score = "failed", None
        elif not outcome.gated:
            rate_field, score = "gated", None
        else:
            rate_field = outcome.rate_bpm
            score = outcome.diagnostics.get("selection_score")
        if as_json:
            click.echo(json.dumps({
                "window_start_s": start_s,
                "system": system,
                "rate_bpm": rate_field if isinstance(rate_field, str)
                else round(rate_field, 6),
                "score": score,
            }))
        else:
            rate_txt = (rate_field if isinstance(rate_field, str)
                        else f"{rate_field:.3f}")
            score_txt = "-" if score is None else f"{score:.4g}"
            click.echo(f"{start_s:>10.3f} {rate_txt:>10} {score_txt:>12}")
    if failures:
        click.echo(f"{failures} window(s) produced no estimate", err=True)
        sys.exit(1)


@main.command()
@click.option("--in", "in_path", required=True, help="Recording path.")
@click.option("--truth", "truth_path", required=True,
              help="Ground-truth track path.")
@click.option("--systems", "systems_spec", required=True,
              help="Comma-separated system names.")
@click.option("--out", "out_path", required=True,
              help="Output report (CSV).")
@click.option("--window", "window_s", default=30.0, show_default=True)
@click.option("--step", "step_s", default=1.0, show_default=True)
@click.option("--align", default="end",
              type=click.Choice(["end", "center", "start"]),
              help="Truth alignment within the window.")
@click.option("--threads", default=None, type=int)
@_cli_errors
def evaluate(in_path, truth_path, systems_spec, out_path, window_s, step_s,
             align, threads):
    """Compare systems against ground truth; write a per-window CSV."""
    _require_file(in_path, "recording")
    _require_file(truth_path, "truth track")
    names = _parse_system_list(systems_spec)
    recording = read_recording(in_path)
    truth = read_truth(truth_path)
    report = compare_systems(recording, truth,
                             [SystemConfig(n) for n in names],
                             window_s, step_s, align, threads)
    report.write_csv(out_path)
    for line in report.summary_lines():
        click.echo(line)
    click.echo(f"wrote {out_path}", err=True)
    if any(r.summary.failed_fraction > 0 for r in report.reports):
        click.echo("some windows produced no estimate", err=True)
        sys.exit(1)


@main.command("systems")
def systems_command():
    """List the six systems with their resolved default parameters."""
    for name, params in list_systems().items():
        click.echo(name)
        for key, value in params.items():
            click.echo(f"    {key} = {value}")


if __name__ == "__main__":
    main()
