"""The six named breathing-rate estimation systems.

Each system is a fixed stage plan over the calibration / selection /
filtering / detection operations, configured by a :class:`SystemConfig`:

* ``phasebeat`` - RX phase differences, MAD selection, peak detection.
* ``phasebeat-mad-psd`` - as above with PSD detection.
* ``phasebeat-boi-psd`` - band-of-interest selection and PSD detection.
* ``complexbeat-cir`` - amplitude + phase calibration, delay-domain
  representation, BoI selection, PSD detection.
* ``complexbeat-csi`` - as above but selecting in the subcarrier domain.
* ``complexbeat-csi-df`` - adds the delay filter before selection.

Every system first computes the stability score Q on the raw phase
differences and skips the window unless ``Q < q_threshold``; the PhaseBeat
family then detrends with the Hampel filter and smooths the selected series
with the db4 approximation, while the ComplexBeat family calibrates the
complex CSI and band-passes the selected series instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np
from sklearn.base import BaseEstimator

from .calibration import amplitude_calibrate, phase_calibrate, phase_difference
from .core import CsiSampleSet, csi_to_cir
from .detection import BreathingEstimate, peak_detect, psd_detect
from .exceptions import (EstimationError, PipelineStageError,
                         ValidationError)
from .filters import band_pass, delay_filter, dwt_db4_approx, hampel_detrend
from .selection import (BoiConfig, STABILITY_THRESHOLD, boi_select, is_stable,
                        mad_select, stability_score)
from .validation import require

SYSTEM_NAMES = (
    "phasebeat",
    "phasebeat-mad-psd",
    "phasebeat-boi-psd",
    "complexbeat-cir",
    "complexbeat-csi",
    "complexbeat-csi-df",
)


@dataclass(frozen=True)
class _StagePlan:
    family: str          # "phase" | "complex"
    select: str          # "mad" | "boi"
    detect: str          # "peak" | "psd"
    representation: str  # "csi" | "cir" (complex family only)
    use_delay_filter: bool


_PLANS = {
    "phasebeat": _StagePlan("phase", "mad", "peak", "csi", False),
    "phasebeat-mad-psd": _StagePlan("phase", "mad", "psd", "csi", False),
    "phasebeat-boi-psd": _StagePlan("phase", "boi", "psd", "csi", False),
    "complexbeat-cir": _StagePlan("complex", "boi", "psd", "cir", False),
    "complexbeat-csi": _StagePlan("complex", "boi", "psd", "csi", False),
    "complexbeat-csi-df": _StagePlan("complex", "boi", "psd", "csi", True),
}


@dataclass(frozen=True)
class SystemConfig:
    """Resolved parameter set of one system run."""

    name: str
    q_threshold: float = STABILITY_THRESHOLD
    boi_low_hz: float = 0.2
    boi_high_hz: float = 0.5
    hampel_window_s: float = 5.0
    hampel_threshold: float = 0.01
    delay_max_s: float = 50e-9
    psd_resolution_hz: float = 0.001
    dominant_halfwidth: int = 1
    fit_window: int = 8
    peak_prominence: float = 0.2

    def __post_init__(self):
        if self.name not in SYSTEM_NAMES:
            raise ValidationError(
                f"unknown system {self.name!r}; valid names: "
                + ", ".join(SYSTEM_NAMES))
        require(self.q_threshold > 0, "q_threshold must be positive")
        require(0 < self.boi_low_hz < self.boi_high_hz,
                "need 0 < boi_low_hz < boi_high_hz")
        require(self.hampel_window_s > 0, "hampel_window_s must be positive")
        require(self.hampel_threshold > 0,
                "hampel_threshold must be positive")
        require(self.delay_max_s > 0, "delay_max_s must be positive")
        require(self.psd_resolution_hz > 0,
                "psd_resolution_hz must be positive")
        require(self.dominant_halfwidth >= 0,
                "dominant_halfwidth must be >= 0")
        require(self.fit_window >= 2, "fit_window must be >= 2")
        require(self.peak_prominence >= 0,
                "peak_prominence must be >= 0")

    @property
    def plan(self) -> _StagePlan:
        return _PLANS[self.name]

    @property
    def boi(self) -> BoiConfig:
        return BoiConfig(self.boi_low_hz, self.boi_high_hz)

    def with_overrides(self, **kwargs) -> "SystemConfig":
        return replace(self, **kwargs)


def _stage(name: str, fn, *args, **kwargs):
    """Run one stage, attaching the stage name to estimation failures."""
    try:
        return fn(*args, **kwargs)
    except PipelineStageError:
        raise
    except (ValidationError, EstimationError) as exc:
        raise PipelineStageError(name, str(exc)) from exc


def run_window(csi: CsiSampleSet, cfg: SystemConfig) -> BreathingEstimate:
    """Estimate the breathing rate of one analysis window.

    A window that fails the stability gate returns ``gated=False`` with no
    rate; all other stage failures raise :class:`PipelineStageError` naming
    the stage.
    """
    if not isinstance(csi, CsiSampleSet):
        raise ValidationError("run_window expects a CsiSampleSet window")
    plan = cfg.plan
    f_s = csi.meta.snapshot_rate_hz

    diffs = _stage("phase-difference", phase_difference, csi)
    q = stability_score(diffs)
    diagnostics: dict = {"q": q}
    if not is_stable(q, cfg.q_threshold):
        return BreathingEstimate(rate_hz=None, method=plan.detect,
                                 gated=False, diagnostics=diagnostics)

    if plan.family == "phase":
        _, detrended = _stage("hampel-detrend", hampel_detrend, diffs, f_s,
                              cfg.hampel_window_s, cfg.hampel_threshold)
        if plan.select == "mad":
            candidate = _stage("select", mad_select, detrended)
        else:
            candidate = _stage("select", boi_select, detrended, cfg.boi,
                               f_s)
        series = _stage("wavelet", dwt_db4_approx, candidate.series, f_s)
        if plan.detect == "peak":
            estimate = _stage("detect", peak_detect, series, f_s,
                              f_max=cfg.boi_high_hz,
                              prominence_factor=cfg.peak_prominence)
        else:
            estimate = _stage("detect", psd_detect, series, f_s,
                              cfg.boi_low_hz, cfg.boi_high_hz,
                              cfg.psd_resolution_hz)
    else:
        calibrated = _stage("amplitude-calibration", amplitude_calibrate,
                            csi, cfg.dominant_halfwidth)
        calibrated = _stage("phase-calibration", phase_calibrate,
                            calibrated, cfg.fit_window)
        if plan.representation == "cir":
            representation = _stage("delay-transform", csi_to_cir,
                                    calibrated)
        elif plan.use_delay_filter:
            representation = _stage("delay-filter", delay_filter,
                                    calibrated, cfg.delay_max_s)
        else:
            representation = calibrated
        candidate = _stage("select", boi_select, representation, cfg.boi)
        series = _stage("band-pass", band_pass, candidate.series,
                        cfg.boi_low_hz, cfg.boi_high_hz, f_s)
        estimate = _stage("detect", psd_detect, series, f_s,
                          cfg.boi_low_hz, cfg.boi_high_hz,
                          cfg.psd_resolution_hz)

    diagnostics["selection_score"] = candidate.score
    diagnostics["selection_domain"] = candidate.domain
    diagnostics["selection_index"] = (candidate.tx_index,
                                      candidate.rx_index,
                                      candidate.bin_index)
    diagnostics.update(estimate.diagnostics)
    return BreathingEstimate(estimate.rate_hz, estimate.method,
                             gated=True, diagnostics=diagnostics)


def list_systems() -> dict[str, dict]:
    """All six system names with their resolved default parameters.

    Each entry lists only the parameters its stages consume; in particular
    the delay bound appears only for ``complexbeat-csi-df``.
    """
    table: dict[str, dict] = {}
    for name in SYSTEM_NAMES:
        cfg = SystemConfig(name)
        plan = cfg.plan
        params: dict = {
            "q_threshold": cfg.q_threshold,
            "boi_low_hz": cfg.boi_low_hz,
            "boi_high_hz": cfg.boi_high_hz,
        }
        if plan.family == "phase":
            params["hampel_window_s"] = cfg.hampel_window_s
            params["hampel_threshold"] = cfg.hampel_threshold
        else:
            params["dominant_halfwidth"] = cfg.dominant_halfwidth
            params["fit_window"] = cfg.fit_window
        if plan.detect == "psd":
            params["psd_resolution_hz"] = cfg.psd_resolution_hz
        else:
            params["peak_prominence"] = cfg.peak_prominence
        if plan.use_delay_filter:
            params["delay_max_s"] = cfg.delay_max_s
        table[name] = params
    return table


class BreathingRateEstimator(BaseEstimator):
    """Sklearn-style front end over the window pipeline.

    Parameters mirror :class:`SystemConfig`;  ``predict`` maps one window or
    an iterable of windows to rates in Hz, encoding gated or unusable
    windows as NaN.  ``estimate`` returns the full
    :class:`~csibreath.detection.BreathingEstimate` of a single window and
    lets stage errors propagate.
    """

    def __init__(self, system: str = "complexbeat-csi-df", *,
                 q_threshold: float = STABILITY_THRESHOLD,
                 boi_low_hz: float = 0.2, boi_high_hz: float = 0.5,
                 hampel_window_s: float = 5.0,
                 hampel_threshold: float = 0.01,
                 delay_max_s: float = 50e-9,
                 psd_resolution_hz: float = 0.001,
                 dominant_halfwidth: int = 1, fit_window: int = 8,
                 peak_prominence: float = 0.2):
        self.system = system
        self.q_threshold = q_threshold
        self.boi_low_hz = boi_low_hz
        self.boi_high_hz = boi_high_hz
        self.hampel_window_s = hampel_window_s
        self.hampel_threshold = hampel_threshold
        self.delay_max_s = delay_max_s
        self.psd_resolution_hz = psd_resolution_hz
        self.dominant_halfwidth = dominant_halfwidth
        self.fit_window = fit_window
        self.peak_prominence = peak_prominence

    def get_config(self) -> SystemConfig:
        return SystemConfig(
            name=self.system, q_threshold=self.q_threshold,
            boi_low_hz=self.boi_low_hz, boi_high_hz=self.boi_high_hz,
            hampel_window_s=self.hampel_window_s,
            hampel_threshold=self.hampel_threshold,
            delay_max_s=self.delay_max_s,
            psd_resolution_hz=self.psd_resolution_hz,
            dominant_halfwidth=self.dominant_halfwidth,
            fit_window=self.fit_window,
            peak_prominence=self.peak_prominence)

    def fit(self, X=None, y=None):
        """Validate the parameter set; the pipeline itself is stateless."""
        self.config_ = self.get_config()
        return self

    def estimate(self, window: CsiSampleSet) -> BreathingEstimate:
        return run_window(window, self.get_config())

    def predict(self, X) -> np.ndarray:
        """Rates in Hz for one window or an iterable of windows."""
        windows: Iterable[CsiSampleSet]
        if isinstance(X, CsiSampleSet):
            windows = [X]
        else:
            windows = X
        cfg = self.get_config()
        rates = []
        for window in windows:
            try:
                est = run_window(window, cfg)
            except EstimationError:
                rates.append(np.nan)
                continue
            rates.append(np.nan if est.rate_hz is None else est.rate_hz)
        return np.asarray(rates, dtype=np.float64)
