"""Time-axis and delay-axis conditioning filters.

* ``hampel_detrend`` extracts the slow trend of a series with an
  outlier-robust sliding median (a Hampel filter run with a tiny threshold,
  so nearly every sample is replaced by its window median) and returns both
  the trend and the detrended residual.
* ``dwt_db4_approx`` keeps the low-frequency approximation of an orthogonal
  Daubechies-4 (8-tap) wavelet decomposition, with the level chosen so the
  approximation band just covers breathing rates up to 0.5 Hz.
* ``delay_filter`` zeroes CIR bins beyond a delay bound and returns to the
  subcarrier domain.
* ``band_pass`` zeroes DFT bins of a snapshot series outside a frequency
  band (both signed sides).

The wavelet transform uses symmetric (half-sample) boundary extension and
expansive coefficient storage, so the full decomposition reconstructs the
input to floating-point accuracy regardless of series length.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from sklearn.base import BaseEstimator, TransformerMixin

from .core import (CirSampleSet, CsiSampleSet, GRID_RTOL, bin_delays,
                   cir_to_csi, csi_to_cir)
from .detection import band_mask
from .validation import as_real_series, as_series, require

# Scales a window's median absolute deviation to a Gaussian-consistent
# standard deviation estimate.
MAD_SCALE = 1.4826

# Daubechies-4 scaling filter (8 taps, sums to sqrt(2)); the quadrature
# mirror highpass is derived below.
_DB4_LO = np.array([
    0.23037781330885523, 0.7148465705525415, 0.6308807679295904,
    -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945, -0.010597401784997278,
])
_DB4_HI = ((-1.0) ** np.arange(8)) * _DB4_LO[::-1]
_PAD = _DB4_LO.size - 1


def hampel_detrend(x, f_s: float, window_s: float = 5.0,
                   threshold: float = 0.01):
    """Split a series into a sliding-median trend and a residual.

    The window spans ``floor(window_s * f_s)`` samples, centered and shrunk
    at the edges.  Samples within ``threshold`` scaled window-MADs of the
    window median stay in the trend as-is; everything else (with the small
    default threshold: almost everything) is replaced by the median.
    Returns ``(dc, ac)`` with ``ac = x - dc``.

    Accepts N-D input and filters along axis 0.
    """
    arr = np.asarray(x, dtype=np.float64)
    require(f_s > 0, "f_s must be positive")
    width = int(np.floor(window_s * f_s))
    require(width >= 3, "window must span at least 3 samples")
    med, mad = _sliding_median_mad(arr, width)
    outlier = np.abs(arr - med) > threshold * (MAD_SCALE * mad)
    dc = np.where(outlier, med, arr)
    return dc, arr - dc


def _sliding_median_mad(arr: np.ndarray, width: int):
    """Centered sliding median and window MAD along axis 0, edges shrunk."""
    t_count = arr.shape[0]
    half_lo = (width - 1) // 2
    half_hi = width // 2
    med = np.empty_like(arr)
    mad = np.empty_like(arr)
    if t_count >= width:
        windows = sliding_window_view(arr, width, axis=0)
        center = np.median(windows, axis=-1)
        med[half_lo:t_count - half_hi] = center
        mad[half_lo:t_count - half_hi] = np.median(
            np.abs(windows - center[..., np.newaxis]), axis=-1)
        edges = [*range(half_lo), *range(t_count - half_hi, t_count)]
    else:
        edges = list(range(t_count))
    for t in edges:
        window = arr[max(0, t - half_lo):min(t_count, t + half_hi + 1)]
        m = np.median(window, axis=0)
        med[t] = m
        mad[t] = np.median(np.abs(window - m), axis=0)
    return med, mad


def decomposition_level(f_s: float) -> int:
    """Deepest dyadic level whose approximation band still covers 0.5 Hz.

    Picks the integer L with ``f_s / 2**(L+2) < 0.5 <= f_s / 2**(L+1)``.
    """
    require(f_s > 0, "f_s must be positive")
    level = int(np.floor(np.log2(f_s)))
    while f_s / 2.0 ** (level + 1) < 0.5:
        level -= 1
    while not f_s / 2.0 ** (level + 2) < 0.5:
        level += 1
    return level


@dataclass(frozen=True)
class WaveletDecomp:
    """Multi-level db4 decomposition: approximation plus per-level details.

    ``details[0]`` is the finest level; ``lengths`` records the series
    length entering each level so reconstruction can crop exactly.
    """

    level: int
    approx: np.ndarray = field(repr=False)
    details: tuple[np.ndarray, ...] = field(repr=False)
    lengths: tuple[int, ...]


def _symmetric_extend(x: np.ndarray, pad: int) -> np.ndarray:
    return np.concatenate([x[:pad][::-1], x, x[-pad:][::-1]])


def _dwt_step(x: np.ndarray):
    ext = _symmetric_extend(x, _PAD)
    approx = np.correlate(ext, _DB4_LO, mode="valid")[::2]
    detail = np.correlate(ext, _DB4_HI, mode="valid")[::2]
    return approx, detail


def _idwt_step(approx: np.ndarray, detail: np.ndarray,
               out_len: int) -> np.ndarray:
    up_a = np.zeros(2 * approx.size)
    up_a[::2] = approx
    up_d = np.zeros(2 * detail.size)
    up_d[::2] = detail
    full = np.convolve(up_a, _DB4_LO) + np.convolve(up_d, _DB4_HI)
    return full[_PAD:_PAD + out_len]


def wavelet_decompose(x, level: int) -> WaveletDecomp:
    """Decompose a real series to the given db4 level."""
    arr = as_real_series(x)
    require(level >= 1, "decomposition level must be >= 1")
    details = []
    lengths = []
    current = arr
    for l in range(level):
        require(current.size >= _DB4_LO.size,
                f"series too short for db4 level {l + 1}: "
                f"{current.size} < {_DB4_LO.size} samples")
        lengths.append(current.size)
        current, detail = _dwt_step(current)
        details.append(detail)
    return WaveletDecomp(level, current, tuple(details), tuple(lengths))


def wavelet_reconstruct(decomp: WaveletDecomp,
                        keep_details: bool = True) -> np.ndarray:
    """Invert a decomposition; with ``keep_details=False`` the details are
    zeroed, leaving the pure level-L approximation at full length."""
    current = decomp.approx
    for l in range(decomp.level, 0, -1):
        detail = decomp.details[l - 1]
        if not keep_details:
            detail = np.zeros_like(detail)
        current = _idwt_step(current, detail, decomp.lengths[l - 1])
    return current


def dwt_db4_approx(x, f_s: float) -> np.ndarray:
    """Low-frequency db4 approximation of a series, at full length.

    The level follows :func:`decomposition_level`, so the retained band
    ends between 0.5 Hz and 1 Hz regardless of the snapshot rate.
    """
    level = decomposition_level(f_s)
    require(level >= 1,
            f"snapshot rate {f_s} Hz yields decomposition level {level}; "
            "the approximation band would not be below the input band")
    return wavelet_reconstruct(wavelet_decompose(x, level),
                               keep_details=False)


def delay_filter(csi: CsiSampleSet, delay_max_s: float = 50e-9) -> CsiSampleSet:
    """Zero all CIR bins with |delay| beyond ``delay_max_s``.

    Delays follow the signed circular bin map, so the top bins (negative
    delays) are compared by magnitude; the bound is inclusive within the
    grid tolerance.
    """
    require(delay_max_s > 0, "delay_max_s must be positive")
    keep = (np.abs(bin_delays(csi.meta))
            <= delay_max_s * (1.0 + GRID_RTOL))
    cir = csi_to_cir(csi)
    return cir_to_csi(CirSampleSet(csi.meta, cir.data * keep))


def band_pass(x, f_low: float, f_high: float, f_s: float) -> np.ndarray:
    """Zero the DFT bins of a snapshot series outside [f_low, f_high].

    Both signed sides of the band are kept (edges inclusive within the grid
    tolerance) and everything else, including DC when ``f_low > 0``, is
    removed before transforming back.  Always returns a complex series.
    """
    arr = as_series(x, min_length=1)
    require(0 <= f_low < f_high, "need 0 <= f_low < f_high")
    require(f_high <= f_s / 2 * (1.0 + GRID_RTOL),
            "f_high must not exceed the Nyquist rate")
    freqs = np.fft.fftfreq(arr.size, d=1.0 / f_s)
    keep = band_mask(freqs, f_low, f_high)
    return np.fft.ifft(np.fft.fft(arr) * keep)


class DelayFilter(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapping :func:`delay_filter`."""

    def __init__(self, delay_max_s: float = 50e-9):
        self.delay_max_s = delay_max_s

    def fit(self, X, y=None):
        return self

    def transform(self, X: CsiSampleSet) -> CsiSampleSet:
        return delay_filter(X, self.delay_max_s)
