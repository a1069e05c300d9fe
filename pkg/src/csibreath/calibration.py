"""Amplitude and phase calibration of distorted CSI sample sets.

Three distortion-removal operations:

* ``amplitude_calibrate`` rescales every (t, i, j) slice by the measured
  dominant-path magnitude in the delay domain, cancelling the per-snapshot
  AGC gain while leaving phases untouched.
* ``phase_calibrate`` fits a line to the phase of a high-amplitude run of
  adjacent subcarriers on RX antenna ``j`` and subtracts that line from the
  phase of antenna ``(j + 1) mod N_R``.  The hardware offsets are identical
  on both antennas and linear in the subcarrier index, so they cancel; what
  remains differs from the true phase only by a term that is constant over
  snapshots when the dominant path is static.
* ``phase_difference`` subtracts the phases of adjacent RX antennas
  outright, the classical reference-antenna approach.

Thin sklearn-style transformers wrap each operation for pipeline use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.base import BaseEstimator, TransformerMixin

from .core import CsiSampleSet
from .exceptions import ValidationError
from .validation import require


@dataclass(frozen=True)
class LinearPhaseFit:
    """Least-squares phase line over a contiguous subcarrier window.

    Slope and intercept are expressed in the global subcarrier coordinate,
    i.e. the fitted phase at subcarrier ``m`` is ``slope * m + intercept``.
    """

    slope: float
    intercept: float
    window: range

    def __post_init__(self):
        require(len(self.window) >= 2, "fit window must span >= 2 subcarriers")


def amplitude_calibrate(csi: CsiSampleSet,
                        dominant_halfwidth: int = 1) -> CsiSampleSet:
    """Normalize each (t, i, j) slice by its dominant-path CIR magnitude.

    The dominant path is the delay bin of maximum magnitude (ties go to the
    smallest bin index).  Each slice is divided by

        sqrt(sum of |h_k|^2 over |k - k*| <= D, circular) / (2 D + 1)

    with ``D = dominant_halfwidth``, which cancels any positive per-slice
    gain.  Phases are unchanged.
    """
    d = dominant_halfwidth
    m = csi.meta.num_subcarriers
    require(d >= 0, "dominant_halfwidth must be >= 0")
    require(2 * d + 1 <= m,
            f"dominant window 2*{d}+1 exceeds {m} subcarriers")
    cir_power = np.abs(np.fft.ifft(csi.data, axis=3)) ** 2
    flat = cir_power.reshape(-1, m)
    peak_bin = np.argmax(flat, axis=1)
    if not np.all(np.take_along_axis(flat, peak_bin[:, None], axis=1) > 0):
        raise ValidationError(
            "amplitude calibration requires a dominant path; "
            "found an all-zero (t, i, j) slice")
    window_cols = (peak_bin[:, None] + np.arange(-d, d + 1)[None, :]) % m
    window_power = np.take_along_axis(flat, window_cols, axis=1).sum(axis=1)
    prefactor = np.sqrt(window_power) / (2 * d + 1)
    scale = (1.0 / prefactor).reshape(csi.meta.shape[:3] + (1,))
    return CsiSampleSet(csi.meta, csi.data * scale)


def _linear_phase_fits(values: np.ndarray, window_len: int):
    """Vectorized linear phase fits for a batch of subcarrier slices.

    ``values`` is ``[N, M]`` complex.  For each row, picks the contiguous
    ``window_len`` run maximizing summed amplitude (ties toward the lowest
    start index), unwraps the phase over the run and fits a least-squares
    line in the global subcarrier coordinate.  Returns per-row arrays
    ``(slope, intercept, start)``.
    """
    n, m = values.shape
    amp = np.abs(values)
    if not np.all(amp.max(axis=1) > 0):
        raise ValidationError("phase fit is degenerate: a slice has "
                              "all-zero amplitudes")
    run_sums = sliding_window_view(amp, window_len, axis=1).sum(axis=-1)
    start = np.argmax(run_sums, axis=1)
    cols = start[:, None] + np.arange(window_len)[None, :]
    phase = np.unwrap(np.angle(np.take_along_axis(values, cols, axis=1)),
                      axis=1)
    # Centered abscissa is the same for every row; only the window origin
    # shifts, which moves the intercept but not the slope.
    x_centered = np.arange(window_len) - (window_len - 1) / 2.0
    slope = (phase @ x_centered) / np.sum(x_centered ** 2)
    intercept = phase.mean(axis=1) - slope * (start + (window_len - 1) / 2.0)
    return slope, intercept, start


def fit_linear_phase(values, window_len: int = 8) -> LinearPhaseFit:
    """Fit a phase line over the strongest ``window_len``-subcarrier run."""
    arr = np.asarray(values, dtype=np.complex128)
    require(arr.ndim == 1, "expected a 1-D subcarrier slice")
    require(window_len >= 2, "window_len must be >= 2")
    require(window_len <= arr.size,
            f"window_len {window_len} exceeds {arr.size} subcarriers")
    slope, intercept, start = _linear_phase_fits(arr[None, :], window_len)
    return LinearPhaseFit(float(slope[0]), float(intercept[0]),
                          range(int(start[0]), int(start[0]) + window_len))


def phase_calibrate(csi: CsiSampleSet, window_len: int = 8) -> CsiSampleSet:
    """Subtract each antenna's fitted phase line from its successor.

    For every (t, i, j), the line fitted on RX antenna ``j`` is subtracted
    from the phase of antenna ``(j + 1) mod N_R``; amplitudes are unchanged.
    Because the injected offsets are identical across RX antennas and linear
    in ``m``, they cancel exactly, leaving the true phase minus the
    neighbour's local line.
    """
    t_count, n_tx, n_rx, m = csi.meta.shape
    require(window_len >= 2, "window_len must be >= 2")
    require(window_len <= m,
            f"window_len {window_len} exceeds {m} subcarriers")
    slope, intercept, _ = _linear_phase_fits(csi.data.reshape(-1, m),
                                             window_len)
    slope = slope.reshape(t_count, n_tx, n_rx, 1)
    intercept = intercept.reshape(t_count, n_tx, n_rx, 1)
    line = slope * np.arange(m) + intercept
    # Antenna j+1 (mod N_R) is corrected with antenna j's line.
    correction = np.roll(np.exp(-1j * line), 1, axis=2)
    return CsiSampleSet(csi.meta, csi.data * correction)


def phase_difference(csi: CsiSampleSet) -> np.ndarray:
    """Phase differences of adjacent RX antennas, wrapped to (-pi, pi].

    Returns a real ``[T, N_T, N_R - 1, M]`` tensor whose entry (t, i, k, m)
    is ``angle(H[t,i,k,m]) - angle(H[t,i,k+1,m])``.  The per-TX phase
    offsets are shared by all RX antennas, so they drop out.
    """
    require(csi.meta.num_rx >= 2, "phase difference needs >= 2 RX antennas")
    return np.angle(csi.data[:, :, :-1, :] * np.conj(csi.data[:, :, 1:, :]))


class PhaseDifference(BaseEstimator, TransformerMixin):
    """Stateless transformer: CsiSampleSet -> adjacent-RX phase-diff tensor."""

    def fit(self, X, y=None):
        return self

    def transform(self, X: CsiSampleSet) -> np.ndarray:
        return phase_difference(X)


class AmplitudeCalibrator(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapping :func:`amplitude_calibrate`."""

    def __init__(self, dominant_halfwidth: int = 1):
        self.dominant_halfwidth = dominant_halfwidth

    def fit(self, X, y=None):
        return self

    def transform(self, X: CsiSampleSet) -> CsiSampleSet:
        return amplitude_calibrate(X, self.dominant_halfwidth)


class PhaseCalibrator(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapping :func:`phase_calibrate`."""

    def __init__(self, window_len: int = 8):
        self.window_len = window_len

    def fit(self, X, y=None):
        return self

    def transform(self, X: CsiSampleSet) -> CsiSampleSet:
        return phase_calibrate(X, self.window_len)
