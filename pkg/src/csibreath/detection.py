"""Breathing-rate detection on a selected, conditioned 1-D series.

Two detectors: ``peak_detect`` averages the spacing of surviving local
maxima of a real series, and ``psd_detect`` returns the frequency of the
maximum of a zero-padded periodogram restricted to the breathing band.

Periodogram convention: the series is mean-removed, optionally zero-padded
to reach a requested frequency resolution, and transformed with an unscaled
forward DFT; reported power is the squared magnitude, so the total power
equals ``N * sum |x - mean|^2`` (Parseval under this scaling).  Band edges
are treated as inclusive within a small relative tolerance so that grid
points computed as ``k * f_s / N`` are not dropped by floating-point
rounding when they coincide with a decimal band edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.signal import peak_prominences

from .core import GRID_RTOL
from .exceptions import EstimationError, ValidationError
from .validation import as_real_series, as_series, require


@dataclass(frozen=True)
class BreathingEstimate:
    """Estimated breathing rate with gate status and diagnostics.

    ``gated`` is True when the stability gate passed (or was not applied);
    a gated-out window carries ``gated=False`` and no rate.
    """

    rate_hz: float | None
    method: str
    gated: bool = True
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    @property
    def rate_bpm(self) -> float | None:
        return None if self.rate_hz is None else 60.0 * self.rate_hz


def band_mask(freqs: np.ndarray, f_low: float, f_high: float) -> np.ndarray:
    """Mask of bins with ``f_low <= |f| <= f_high``, edges inclusive."""
    mag = np.abs(freqs)
    return ((mag >= f_low * (1.0 - GRID_RTOL))
            & (mag <= f_high * (1.0 + GRID_RTOL)))


def _fold_onesided(freqs: np.ndarray, power: np.ndarray, f_s: float):
    """Sum +f and -f bins pairwise onto the nonnegative frequency grid."""
    n = power.size
    half = n // 2
    folded = power[:half + 1].copy()
    tail = power[half + 1:][::-1]
    folded[1:1 + tail.size] += tail
    return np.arange(half + 1) * (f_s / n), folded


def psd(x, f_s: float, pad_to_resolution: float | None = None):
    """Mean-removed periodogram of a real or complex series.

    Returns ``(freqs, power)``.  Complex input keeps the full signed
    frequency grid; real input is folded to the one-sided convention
    (pairwise-summed mirror bins).  With ``pad_to_resolution`` the series is
    zero-padded to ``ceil(f_s / resolution)`` samples before the transform.
    """
    arr = as_series(x, min_length=2)
    require(f_s > 0, "f_s must be positive")
    n = arr.size
    if pad_to_resolution is not None:
        require(pad_to_resolution > 0, "resolution must be positive")
        n = max(n, math.ceil(f_s / pad_to_resolution))
    centered = arr - arr.mean()
    power = np.abs(np.fft.fft(centered, n)) ** 2
    freqs = np.fft.fftfreq(n, d=1.0 / f_s)
    if not np.iscomplexobj(arr):
        return _fold_onesided(freqs, power, f_s)
    return freqs, power


def psd_detect(x, f_s: float, f_low: float = 0.2, f_high: float = 0.5,
               resolution_hz: float = 0.001) -> BreathingEstimate:
    """Rate at the in-band maximum of the zero-padded periodogram.

    Positive- and negative-frequency bins are summed pairwise before the
    argmax, so a complex series with lines at +/- f counts as one peak.
    """
    arr = as_series(x, min_length=2)
    require(0 <= f_low < f_high, "need 0 <= f_low < f_high")
    freqs, power = psd(arr, f_s, pad_to_resolution=resolution_hz)
    if np.iscomplexobj(arr):
        freqs, power = _fold_onesided(freqs, power, f_s)
    mask = band_mask(freqs, f_low, f_high)
    if not mask.any():
        raise ValidationError(
            f"no spectral bins inside [{f_low}, {f_high}] Hz: "
            "frequency grid too coarse")
    band_freqs = freqs[mask]
    band_power = power[mask]
    best = int(np.argmax(band_power))
    return BreathingEstimate(
        rate_hz=float(band_freqs[best]), method="psd",
        diagnostics={"psd_peak": float(band_power[best]),
                     "grid_step_hz": float(freqs[1] - freqs[0])})


def peak_detect(x, f_s: float, f_max: float = 0.5,
                prominence_factor: float = 0.2) -> BreathingEstimate:
    """Rate from the mean spacing of surviving local maxima.

    Strict local maxima are filtered in two steps: peaks with prominence
    below ``prominence_factor * std(x)`` are dropped, then a left-to-right
    sweep enforces a minimum separation of ``1 / f_max`` seconds, keeping
    the higher peak of any violating pair.  Fewer than two survivors means
    the window is unusable.
    """
    arr = as_real_series(x, min_length=3, name="series")
    require(f_s > 0, "f_s must be positive")
    require(f_max > 0, "f_max must be positive")
    interior = arr[1:-1]
    candidates = np.nonzero((interior > arr[:-2]) & (interior > arr[2:]))[0] + 1
    if candidates.size:
        prominences = peak_prominences(arr, candidates)[0]
        candidates = candidates[prominences >= prominence_factor * np.std(arr)]

    min_sep_samples = f_s / f_max
    kept: list[int] = []
    for idx in candidates:
        if kept and idx - kept[-1] < min_sep_samples:
            if arr[idx] > arr[kept[-1]]:
                kept[-1] = int(idx)
        else:
            kept.append(int(idx))

    if len(kept) < 2:
        raise EstimationError(
            f"peak detection found {len(kept)} usable peaks; "
            "need at least 2 to measure a spacing")
    spacings_s = np.diff(kept) / f_s
    return BreathingEstimate(
        rate_hz=float(1.0 / spacings_s.mean()), method="peak",
        diagnostics={"peak_count": len(kept)})
