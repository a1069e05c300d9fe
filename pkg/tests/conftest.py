"""Shared scenario builders for the test suite."""

from __future__ import annotations

import numpy as np

import csibreath as cb


def radio_meta(snapshots: int = 297) -> cb.RadioMeta:
    """The canonical 1x2x29 geometry at 9.9 Hz."""
    return cb.RadioMeta(snapshots, 1, 2, 29, 9.9, 703125.0, 5.32e9)


def breathing_scenario(rate_hz: float = 0.25, seed: int = 7,
                       snr_db: float | None = 30.0,
                       chest_amplitude: float = 0.1,
                       snapshots: int = 297,
                       extra_static: bool = False) -> cb.Scenario:
    """One strong static path plus a weaker breathing chest path per pair.

    The two RX antennas get slightly different delays and phases so the
    adjacent-antenna phase differences carry the breathing signal.
    """
    meta = radio_meta(snapshots)
    paths = {}
    for j in range(meta.num_rx):
        plist = [
            cb.PathSpec(np.exp(0.3j * j), 1.5e-8 + 5e-10 * j),
            cb.PathSpec(chest_amplitude * np.exp(2.1j - 3.2j * j),
                        3.5e-8 + 5e-10 * j, dynamic=True),
        ]
        if extra_static:
            plist.insert(1, cb.PathSpec(0.25 * np.exp(1.2j - 1.9j * j),
                                        4.5e-8 + 1e-9 * j))
        paths[(0, j)] = tuple(plist)
    distortion = cb.DistortionSpec(
        agc_range=(0.5, 2.0), phase_slope_range=(-0.1, 0.1),
        phase_intercept_range=(-np.pi, np.pi), noise_snr_db=snr_db,
        rng_seed=seed)
    return cb.Scenario(meta, paths, cb.BreathingMotion(rate_hz), distortion)


def static_noise_scenario(snr_db: float = -5.0, seed: int = 3,
                          snapshots: int = 297) -> cb.Scenario:
    """Static channel buried in noise; windows should fail the Q gate."""
    meta = radio_meta(snapshots)
    paths = {(0, j): (cb.PathSpec(np.exp(0.4j * j), 1.6e-8 + 1e-9 * j),)
             for j in range(meta.num_rx)}
    distortion = cb.DistortionSpec(
        agc_range=(0.5, 2.0), phase_slope_range=(-0.1, 0.1),
        phase_intercept_range=(-np.pi, np.pi), noise_snr_db=snr_db,
        rng_seed=seed)
    return cb.Scenario(meta, paths, None, distortion)


def varied_scenario(rate_hz: float, seed: int,
                    snr_db: float | None) -> cb.Scenario:
    """Randomized geometry (seeded): two static paths plus a chest path."""
    rng = np.random.default_rng(seed + 5000)
    meta = radio_meta()
    paths = {}
    for j in range(meta.num_rx):
        paths[(0, j)] = (
            cb.PathSpec(np.exp(1j * rng.uniform(-np.pi, np.pi)),
                        rng.uniform(1e-8, 2.5e-8)),
            cb.PathSpec(0.3 * np.exp(1j * rng.uniform(-np.pi, np.pi)),
                        rng.uniform(3e-8, 4.8e-8)),
            cb.PathSpec(0.15 * np.exp(1j * rng.uniform(-np.pi, np.pi)),
                        rng.uniform(2.5e-8, 4.5e-8), dynamic=True),
        )
    distortion = cb.DistortionSpec(
        agc_range=(0.5, 2.0), phase_slope_range=(-0.1, 0.1),
        phase_intercept_range=(-np.pi, np.pi), noise_snr_db=snr_db,
        rng_seed=seed)
    return cb.Scenario(meta, paths, cb.BreathingMotion(rate_hz), distortion)


def random_sample_set(rng: np.random.Generator,
                      shape=(8, 1, 2, 29)) -> cb.CsiSampleSet:
    """Random CSI set whose values are exactly float32-representable."""
    t, n_tx, n_rx, m = shape
    meta = cb.RadioMeta(t, n_tx, n_rx, m, 9.9, 703125.0, 5.32e9)
    re = rng.standard_normal(shape).astype(np.float32)
    im = rng.standard_normal(shape).astype(np.float32)
    return cb.CsiSampleSet(meta, re.astype(np.float64)
                           + 1j * im.astype(np.float64))
