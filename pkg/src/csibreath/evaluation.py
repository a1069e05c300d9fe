"""Recording-level evaluation against a ground-truth rate track.

Runs a system over every sliding window of a recording, aligns each window
with the truth row nearest its end (the most recent physiology; alignment is
switchable), and reports absolute errors in bpm together with the empirical
CDF of those errors.  Gated and unusable windows are excluded from the CDF
but counted in their own fractions.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CsiSampleSet
from .dataio import GroundTruthTrack, sliding_windows, snapshot_count
from .exceptions import EstimationError, TruthCoverageError
from .systems import SystemConfig, run_window
from .validation import require

ERROR_THRESHOLDS_BPM = (0.5, 1.2)


@dataclass(frozen=True)
class WindowRow:
    """Per-window evaluation outcome."""

    start_s: float
    status: str  # "ok" | "gated" | "failed"
    estimate_bpm: float | None
    truth_bpm: float
    abs_error_bpm: float | None
    score: float | None


@dataclass(frozen=True)
class ReportSummary:
    n_windows: int
    n_estimates: int
    gated_fraction: float
    failed_fraction: float
    fraction_below_0_5_bpm: float | None
    fraction_below_1_2_bpm: float | None
    median_abs_error_bpm: float | None

    @property
    def no_estimates(self) -> bool:
        return self.n_estimates == 0


@dataclass(frozen=True)
class ErrorReport:
    """Evaluation of one system over one recording."""

    system: str
    rows: tuple[WindowRow, ...]
    summary: ReportSummary
    cdf_errors_bpm: np.ndarray
    cdf_fractions: np.ndarray

    def summary_line(self) -> str:
        s = self.summary
        if s.no_estimates:
            return (f"{self.system}: windows={s.n_windows} "
                    f"gated={s.gated_fraction:.2f} no estimates")
        return (f"{self.system}: windows={s.n_windows} "
                f"estimates={s.n_estimates} "
                f"gated={s.gated_fraction:.2f} "
                f"err<0.5bpm={s.fraction_below_0_5_bpm:.2f} "
                f"err<1.2bpm={s.fraction_below_1_2_bpm:.2f} "
                f"median={s.median_abs_error_bpm:.3f}bpm")


def _align_time(start_index: int, width: int, f_s: float,
                align: str) -> float:
    if align == "end":
        return (start_index + width) / f_s
    if align == "center":
        return (start_index + width / 2) / f_s
    if align == "start":
        return start_index / f_s
    raise ValueError(f"unknown alignment {align!r}")


def _check_coverage(track: GroundTruthTrack,
                    needed_times: Sequence[float]) -> None:
    lo, hi = track.span_s
    # Nearest-row lookup tolerates half a row spacing beyond the track ends.
    spacing = (np.median(np.diff(track.times_s))
               if track.times_s.size > 1 else 1.0)
    slack = spacing / 2
    t_min, t_max = min(needed_times), max(needed_times)
    if t_min < lo - slack or t_max > hi + slack:
        raise TruthCoverageError(
            f"truth track covers [{lo:g} s, {hi:g} s] but evaluation "
            f"needs [{t_min:g} s, {t_max:g} s]")


def _map_windows(fn, windows, n_threads: int | None):
    if n_threads is None:
        n_threads = os.cpu_count() or 1
    if n_threads <= 1 or len(windows) <= 1:
        return [fn(w) for w in windows]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(fn, windows))


def evaluate(recording: CsiSampleSet, truth: GroundTruthTrack,
             cfg: SystemConfig, window_s: float = 30.0, step_s: float = 1.0,
             align: str = "end", n_threads: int | None = None) -> ErrorReport:
    """Evaluate one system over all windows of a recording."""
    f_s = recording.meta.snapshot_rate_hz
    require(bool(np.all(truth.rates_hz < f_s / 2)),
            "truth rates must stay below the Nyquist rate")
    windows = sliding_windows(recording, window_s, step_s)
    require(len(windows) >= 1, "recording is shorter than one window")
    width = windows[0].meta.num_snapshots
    hop = snapshot_count(f_s, step_s)
    times = [_align_time(k * hop, width, f_s, align)
             for k in range(len(windows))]
    _check_coverage(truth, times)

    def run_one(window):
        try:
            return run_window(window, cfg)
        except EstimationError as exc:
            return exc

    outcomes = _map_windows(run_one, windows, n_threads)

    rows = []
    for k, outcome in enumerate(outcomes):
        start_s = k * hop / f_s
        truth_bpm = 60.0 * truth.rate_at(times[k])
        if isinstance(outcome, EstimationError):
            rows.append(WindowRow(start_s, "failed", None, truth_bpm,
                                  None, None))
            continue
        score = outcome.diagnostics.get("selection_score")
        if not outcome.gated:
            rows.append(WindowRow(start_s, "gated", None, truth_bpm,
                                  None, score))
            continue
        est_bpm = outcome.rate_bpm
        rows.append(WindowRow(start_s, "ok", est_bpm, truth_bpm,
                              abs(est_bpm - truth_bpm), score))
    return _build_report(cfg.name, rows)


def _build_report(system: str, rows: list[WindowRow]) -> ErrorReport:
    n = len(rows)
    errors = np.array([r.abs_error_bpm for r in rows if r.status == "ok"],
                      dtype=np.float64)
    n_est = errors.size
    gated = sum(r.status == "gated" for r in rows)
    failed = sum(r.status == "failed" for r in rows)
    if n_est:
        cdf_errors = np.sort(errors)
        cdf_fractions = np.arange(1, n_est + 1) / n_est
        below = [float(np.mean(errors < t)) for t in ERROR_THRESHOLDS_BPM]
        median = float(np.median(errors))
    else:
        cdf_errors = np.empty(0)
        cdf_fractions = np.empty(0)
        below = [None, None]
        median = None
    summary = ReportSummary(
        n_windows=n, n_estimates=int(n_est),
        gated_fraction=gated / n if n else 0.0,
        failed_fraction=failed / n if n else 0.0,
        fraction_below_0_5_bpm=below[0],
        fraction_below_1_2_bpm=below[1],
        median_abs_error_bpm=median)
    return ErrorReport(system, tuple(rows), summary, cdf_errors,
                       cdf_fractions)


@dataclass(frozen=True)
class ComparisonReport:
    """Aligned evaluation of several systems over the same recording."""

    reports: tuple[ErrorReport, ...]

    @property
    def systems(self) -> tuple[str, ...]:
        return tuple(r.system for r in self.reports)

    def summary_lines(self) -> list[str]:
        return [r.summary_line() for r in self.reports]

    def to_text(self) -> str:
        """Aligned per-window text table plus one summary line per system."""
        names = self.systems
        header = ["start_s", "truth_bpm"] + [f"{n}_bpm" for n in names]
        widths = [max(10, len(h)) for h in header]
        lines = [" ".join(h.rjust(w) for h, w in zip(header, widths))]
        for k, row in enumerate(self.reports[0].rows):
            cells = [f"{row.start_s:.3f}", f"{row.truth_bpm:.3f}"]
            for report in self.reports:
                r = report.rows[k]
                cells.append(r.status if r.estimate_bpm is None
                             else f"{r.estimate_bpm:.3f}")
            lines.append(" ".join(c.rjust(w)
                                  for c, w in zip(cells, widths)))
        lines.extend(self.summary_lines())
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        """Comma-separated table, one row per window.

        Header: ``window_start_s,truth_bpm`` then per system the columns
        ``<name>_bpm``, ``<name>_abs_error_bpm`` and ``<name>_status``;
        gated or failed windows leave the numeric cells empty.
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        header = ["window_start_s", "truth_bpm"]
        for name in self.systems:
            header += [f"{name}_bpm", f"{name}_abs_error_bpm",
                       f"{name}_status"]
        writer.writerow(header)
        base = self.reports[0].rows
        for k, row in enumerate(base):
            record = [f"{row.start_s:.6f}", f"{row.truth_bpm:.6f}"]
            for report in self.reports:
                r = report.rows[k]
                record += [
                    "" if r.estimate_bpm is None else f"{r.estimate_bpm:.6f}",
                    "" if r.abs_error_bpm is None
                    else f"{r.abs_error_bpm:.6f}",
                    r.status,
                ]
            writer.writerow(record)
        return buffer.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv())


def compare_systems(recording: CsiSampleSet, truth: GroundTruthTrack,
                    configs: Sequence[SystemConfig], window_s: float = 30.0,
                    step_s: float = 1.0, align: str = "end",
                    n_threads: int | None = None) -> ComparisonReport:
    """Evaluate several systems over the same windows of one recording."""
    require(len(configs) >= 1, "need at least one system configuration")
    reports = tuple(evaluate(recording, truth, cfg, window_s, step_s,
                             align, n_threads) for cfg in configs)
    return ComparisonReport(reports)
