"""Multipath channel simulator with a breathing chest path.

Synthesizes ground-truth CSI sample sets from a declarative scenario, then
injects the distortions a real receiver adds on top: a per-snapshot,
per-RX-antenna gain (AGC), a per-snapshot, per-TX phase ramp that is linear
in the subcarrier index (the combined SFO/CFO/PBD/PLL offsets), and complex
white noise.  The synthesized sets are the verification oracle for the
calibration and estimation stages.

Clean synthesis per antenna pair (i, j):

    H[t, m] = sum_p A_p * exp(-j 2 pi (df * m + f_c) * tau_p(t))

where the single dynamic (chest) path has a sinusoidally modulated delay
``tau + dtau * sin(2 pi f_r t / f_s + phase0)`` and static paths are
time-constant.

All randomness comes from one seeded NumPy PCG64 generator, drawn in a fixed
pre-pass order (AGC, then phase slopes, then phase intercepts, then noise;
each array filled row-major), so identical scenarios reproduce bit-identical
output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import CsiSampleSet, RadioMeta
from .exceptions import ValidationError
from .validation import require

SPEED_OF_LIGHT_M_S = 299792458.0

# Round-trip delay swing of a 5 mm chest displacement; small against the
# ~49 ns delay resolution of a 29-subcarrier set, as the dominant-path
# calibration assumes.
CHEST_DELAY_AMPLITUDE_S = 2 * 0.005 / SPEED_OF_LIGHT_M_S


@dataclass(frozen=True)
class PathSpec:
    """One propagation path: complex attenuation, base delay, dynamic flag."""

    attenuation: complex
    delay_s: float
    dynamic: bool = False

    def __post_init__(self):
        require(abs(self.attenuation) > 0, "path attenuation must be nonzero")
        require(self.delay_s >= 0, "path delay must be >= 0")


@dataclass(frozen=True)
class BreathingMotion:
    """Sinusoidal delay modulation of the chest path."""

    rate_hz: float
    delay_amplitude_s: float = CHEST_DELAY_AMPLITUDE_S
    phase_rad: float = 0.0

    def __post_init__(self):
        require(self.rate_hz > 0, "breathing rate must be positive")
        require(self.delay_amplitude_s >= 0,
                "delay amplitude must be >= 0")


@dataclass(frozen=True)
class DistortionSpec:
    """Receiver distortion model: AGC, phase offsets, noise, RNG seed.

    ``agc_range`` draws one positive gain per (snapshot, RX antenna);
    ``phase_slope_range`` (radians per subcarrier index) and
    ``phase_intercept_range`` (radians) draw one offset pair per
    (snapshot, TX antenna), shared by all RX antennas of that snapshot.
    ``noise_snr_db`` is relative to the mean clean-CSI power over all
    entries; ``None`` disables noise.
    """

    agc_range: tuple[float, float] = (1.0, 1.0)
    phase_slope_range: tuple[float, float] = (0.0, 0.0)
    phase_intercept_range: tuple[float, float] = (0.0, 0.0)
    noise_snr_db: float | None = None
    rng_seed: int = 0

    def __post_init__(self):
        require(self.agc_range[0] > 0, "AGC minimum must be positive")
        for name in ("agc_range", "phase_slope_range",
                     "phase_intercept_range"):
            lo, hi = getattr(self, name)
            require(lo <= hi, f"{name} must be ordered (min <= max)")


@dataclass(frozen=True)
class Scenario:
    """Simulator description: per-antenna-pair paths, motion, distortion.

    ``paths`` maps each (tx, rx) antenna pair to its path list; each list may
    contain at most one dynamic path.  ``motion`` is required exactly when
    some pair has a dynamic path.
    """

    meta: RadioMeta
    paths: Mapping[tuple[int, int], Sequence[PathSpec]]
    motion: BreathingMotion | None
    distortion: DistortionSpec

    def __post_init__(self):
        meta = self.meta
        pairs = {(i, j) for i in range(meta.num_tx)
                 for j in range(meta.num_rx)}
        got = set(self.paths)
        if got != pairs:
            raise ValidationError(
                f"paths must cover every antenna pair; missing "
                f"{sorted(pairs - got)}, unexpected {sorted(got - pairs)}")
        alias_limit = 1.0 / meta.subcarrier_spacing_hz
        any_dynamic = False
        for pair, plist in self.paths.items():
            require(len(plist) > 0, f"antenna pair {pair} has no paths")
            n_dyn = sum(p.dynamic for p in plist)
            require(n_dyn <= 1,
                    f"antenna pair {pair} has {n_dyn} dynamic paths")
            any_dynamic = any_dynamic or n_dyn > 0
            for p in plist:
                swing = self.motion.delay_amplitude_s \
                    if (p.dynamic and self.motion is not None) else 0.0
                if p.delay_s + swing >= alias_limit:
                    raise ValidationError(
                        f"path delay {p.delay_s:g} s on pair {pair} exceeds "
                        f"the alias limit 1/subcarrier_spacing = "
                        f"{alias_limit:g} s")
        if any_dynamic and self.motion is None:
            raise ValidationError("scenario has a dynamic path but no motion")

    @classmethod
    def with_shared_paths(cls, meta: RadioMeta, paths: Sequence[PathSpec],
                          motion: BreathingMotion | None,
                          distortion: DistortionSpec) -> "Scenario":
        """Build a scenario with the same path list on every antenna pair."""
        table = {(i, j): tuple(paths) for i in range(meta.num_tx)
                 for j in range(meta.num_rx)}
        return cls(meta, table, motion, distortion)

    @property
    def breathing_rate_hz(self) -> float | None:
        return None if self.motion is None else self.motion.rate_hz


def synth_clean(scenario: Scenario) -> CsiSampleSet:
    """Synthesize the undistorted CSI sample set of a scenario."""
    meta = scenario.meta
    t_count, n_tx, n_rx, m_count = meta.shape
    freqs = (meta.subcarrier_spacing_hz * np.arange(m_count)
             + meta.carrier_freq_hz)
    t_idx = np.arange(t_count)

    data = np.zeros(meta.shape, dtype=np.complex128)
    for (i, j), plist in scenario.paths.items():
        slice_ij = np.zeros((t_count, m_count), dtype=np.complex128)
        for p in plist:
            if p.dynamic:
                motion = scenario.motion
                delay_t = p.delay_s + motion.delay_amplitude_s * np.sin(
                    2 * np.pi * motion.rate_hz * t_idx
                    / meta.snapshot_rate_hz + motion.phase_rad)
                phase = -2j * np.pi * np.outer(delay_t, freqs)
                slice_ij += p.attenuation * np.exp(phase)
            else:
                slice_ij += p.attenuation * np.exp(
                    -2j * np.pi * freqs * p.delay_s)[np.newaxis, :]
        data[:, i, j, :] = slice_ij
    return CsiSampleSet(meta, data)


@dataclass(frozen=True)
class DistortionDraws:
    """Materialized random draws of one distortion pass.

    ``noise_unit`` is unit-variance complex white noise (or ``None``); the
    SNR scaling happens against the clean set at application time.
    """

    agc: np.ndarray             # [T, N_R]
    phase_slope: np.ndarray     # [T, N_T], radians per subcarrier index
    phase_intercept: np.ndarray  # [T, N_T], radians
    noise_unit: np.ndarray | None  # [T, N_T, N_R, M] complex


def draw_distortions(spec: DistortionSpec, meta: RadioMeta) -> DistortionDraws:
    """Draw all random distortion terms in the documented fixed order."""
    rng = np.random.default_rng(spec.rng_seed)
    t_count, n_tx, n_rx, m_count = meta.shape
    agc = rng.uniform(*spec.agc_range, size=(t_count, n_rx))
    slope = rng.uniform(*spec.phase_slope_range, size=(t_count, n_tx))
    intercept = rng.uniform(*spec.phase_intercept_range,
                            size=(t_count, n_tx))
    noise = None
    if spec.noise_snr_db is not None:
        shape = (t_count, n_tx, n_rx, m_count)
        noise = (rng.standard_normal(shape)
                 + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return DistortionDraws(agc, slope, intercept, noise)


def apply_distortion(clean: CsiSampleSet,
                     spec: DistortionSpec) -> CsiSampleSet:
    """Inject AGC, phase offsets and noise into a clean sample set.

    The AGC gain is shared across TX antennas and subcarriers of a snapshot;
    the phase offset ``slope * m + intercept`` is shared across RX antennas
    and applies per TX antenna and snapshot.
    """
    meta = clean.meta
    draws = draw_distortions(spec, meta)
    m_idx = np.arange(meta.num_subcarriers)
    phase = (draws.phase_slope[:, :, None, None] * m_idx
             + draws.phase_intercept[:, :, None, None])
    distorted = (draws.agc[:, None, :, None] * clean.data
                 * np.exp(1j * phase))
    if draws.noise_unit is not None:
        mean_power = np.mean(np.abs(clean.data) ** 2)
        noise_power = mean_power * 10.0 ** (-spec.noise_snr_db / 10.0)
        distorted = distorted + np.sqrt(noise_power) * draws.noise_unit
    return CsiSampleSet(meta, distorted)


def simulate(scenario: Scenario) -> CsiSampleSet:
    """Synthesize and distort in one step."""
    return apply_distortion(synth_clean(scenario), scenario.distortion)
