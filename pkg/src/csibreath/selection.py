"""Stability gating and selection of the most breathing-sensitive series.

``stability_score`` measures how much the adjacent-antenna phase differences
of a window wander around their per-series means; windows whose score is not
strictly below the threshold (default 0.18 rad) are considered unstable and
skipped.  ``mad_select`` and ``boi_select`` then pick the single 1-D series
(over snapshots) most sensitive to breathing, either by mean absolute
deviation or by the ratio of in-band to out-of-band periodogram power.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CirSampleSet, CsiSampleSet
from .detection import band_mask
from .exceptions import ValidationError
from .validation import as_phase_tensor, require

STABILITY_THRESHOLD = 0.18

# Guard against an all-out-of-band signal making the score ratio divide
# by zero.
BOI_SCORE_EPS = 1e-12


@dataclass(frozen=True)
class BoiConfig:
    """Band of interest: plausible human breathing rates, in Hz."""

    low_hz: float = 0.2
    high_hz: float = 0.5

    def __post_init__(self):
        require(0 < self.low_hz < self.high_hz,
                "need 0 < low_hz < high_hz")


@dataclass(frozen=True)
class Candidate:
    """A selected 1-D series over snapshots plus its provenance and score.

    ``rx_index`` is the RX antenna for frequency/delay domains and the
    adjacent-antenna pair index for phase differences; ``bin_index`` is the
    subcarrier index, or the delay-bin index for the delay domain.
    """

    series: np.ndarray = field(repr=False)
    tx_index: int
    rx_index: int
    bin_index: int
    domain: str  # "frequency" | "delay" | "phase-difference"
    score: float

    def __post_init__(self):
        require(self.series.ndim == 1, "candidate series must be 1-D")
        require(min(self.tx_index, self.rx_index, self.bin_index) >= 0,
                "candidate indices must be nonnegative")


def mean_abs_deviation(x: np.ndarray, axis: int = 0) -> np.ndarray:
    """Mean of |x - mean(x)| along ``axis``."""
    return np.mean(np.abs(x - x.mean(axis=axis, keepdims=True)), axis=axis)


def stability_score(phase_diff) -> float:
    """Mean absolute deviation of every phase-difference entry from its
    per-(i, k, m) snapshot mean, averaged over the whole tensor."""
    arr = as_phase_tensor(phase_diff, name="phase differences")
    return float(np.mean(np.abs(arr - arr.mean(axis=0, keepdims=True))))


def is_stable(q: float, threshold: float = STABILITY_THRESHOLD) -> bool:
    """Strict gate: a window qualifies only when ``q < threshold``."""
    return q < threshold


def _unravel(flat_index: int, shape: tuple[int, int, int]):
    return tuple(int(v) for v in np.unravel_index(flat_index, shape))


def mad_select(phase_diff) -> Candidate:
    """Median-of-top-three MAD selection on a phase-difference tensor.

    Computes the mean absolute deviation of every (i, k, m) series,
    pre-selects the three largest, and returns the series holding the median
    MAD among those three.  Ties resolve toward the lowest (i, k, m) index.
    """
    arr = as_phase_tensor(phase_diff, name="phase differences")
    t_count = arr.shape[0]
    flat = arr.reshape(t_count, -1)
    n_series = flat.shape[1]
    require(n_series >= 3,
            f"MAD selection needs >= 3 series, got {n_series}")
    mads = mean_abs_deviation(flat, axis=0)
    # Sort by MAD descending, index ascending; top three are the candidates.
    order = np.lexsort((np.arange(n_series), -mads))
    top3 = order[:3]
    median_value = mads[top3[1]]
    winners = top3[mads[top3] == median_value]
    winner = int(winners.min())
    i, k, m = _unravel(winner, arr.shape[1:])
    return Candidate(series=flat[:, winner].copy(), tx_index=i, rx_index=k,
                     bin_index=m, domain="phase-difference",
                     score=float(mads[winner]))


def boi_select(data, boi: BoiConfig = BoiConfig(),
               f_s: float | None = None) -> Candidate:
    """Select the series with the largest in-band / out-of-band power ratio.

    Accepts a CSI set, a CIR set, or a real phase-difference tensor (the
    latter needs an explicit ``f_s``).  Per series, the score is the summed
    mean-removed periodogram power over ``low <= |f| <= high`` (both signed
    sides) divided by the power over ``|f| > high``; the DC bin and bins
    below the band contribute to neither side.  Ties resolve toward the
    lowest flat (i, j, m) index.
    """
    if isinstance(data, CsiSampleSet):
        tensor, domain = data.data, "frequency"
        f_s = data.meta.snapshot_rate_hz
    elif isinstance(data, CirSampleSet):
        tensor, domain = data.data, "delay"
        f_s = data.meta.snapshot_rate_hz
    else:
        tensor = as_phase_tensor(data, name="selection tensor")
        domain = "phase-difference"
        if f_s is None:
            raise ValidationError(
                "boi_select on a raw tensor requires f_s")
    t_count = tensor.shape[0]
    require(t_count >= 16,
            f"band-of-interest selection needs >= 16 snapshots, "
            f"got {t_count}")
    require(boi.high_hz < f_s / 2,
            "band of interest must stay below the Nyquist rate")

    flat = tensor.reshape(t_count, -1)
    centered = flat - flat.mean(axis=0, keepdims=True)
    power = np.abs(np.fft.fft(centered, axis=0)) ** 2
    freqs = np.fft.fftfreq(t_count, d=1.0 / f_s)
    in_band = band_mask(freqs, boi.low_hz, boi.high_hz)
    out_band = ~band_mask(freqs, 0.0, boi.high_hz)
    scores = (power[in_band].sum(axis=0)
              / (power[out_band].sum(axis=0) + BOI_SCORE_EPS))
    winner = int(np.argmax(scores))
    i, j, m = _unravel(winner, tensor.shape[1:])
    return Candidate(series=flat[:, winner].copy(), tx_index=i, rx_index=j,
                     bin_index=m, domain=domain, score=float(scores[winner]))
