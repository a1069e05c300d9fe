"""CSI/CIR tensor data model and subcarrier <-> delay-domain transforms.

A sample set stacks ``T`` snapshots of the per-link frequency response of an
``N_T x N_R`` OFDM MIMO channel into a complex ``[T, N_T, N_R, M]`` tensor,
where ``M`` is the number of subcarriers.  The delay-domain representation
(channel impulse response) uses the same layout with a circular delay-bin
index ``k`` in place of the subcarrier index ``m``.

DFT convention: the delay -> subcarrier direction carries no scale factor and
the subcarrier -> delay direction carries ``1/M``.  A flat spectrum of value
``A`` then maps to a single impulse of value ``A`` at delay bin 0, and round
trips are scale free.

Delay bins are signed and circular: bin ``k`` sits at delay ``k / (M * df)``
for ``k <= M // 2`` and at ``(k - M) / (M * df)`` above that, with ``df`` the
subcarrier spacing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .validation import check_finite, require

# Relative tolerance for comparisons against frequency/delay grid values.
# Grid points are computed as k * step and can land a few ulp away from the
# decimal value a caller passes as a band edge (e.g. 6/30 Hz vs 0.2 Hz);
# edge comparisons are therefore inclusive within this relative slack.
GRID_RTOL = 1e-9


@dataclass(frozen=True)
class RadioMeta:
    """Dimensions and radio parameters of a sample set."""

    num_snapshots: int
    num_tx: int
    num_rx: int
    num_subcarriers: int
    snapshot_rate_hz: float
    subcarrier_spacing_hz: float
    carrier_freq_hz: float

    def __post_init__(self):
        require(self.num_snapshots >= 1, "num_snapshots must be >= 1")
        require(self.num_tx >= 1, "num_tx must be >= 1")
        # Two RX antennas are the minimum for the phase-difference and
        # adjacent-antenna calibration operations.
        require(self.num_rx >= 2, "num_rx must be >= 2")
        require(self.num_subcarriers >= 2, "num_subcarriers must be >= 2")
        require(self.snapshot_rate_hz > 0, "snapshot_rate_hz must be positive")
        require(self.subcarrier_spacing_hz > 0,
                "subcarrier_spacing_hz must be positive")
        require(self.carrier_freq_hz > 0, "carrier_freq_hz must be positive")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.num_snapshots, self.num_tx, self.num_rx,
                self.num_subcarriers)

    @property
    def duration_s(self) -> float:
        return self.num_snapshots / self.snapshot_rate_hz


def _freeze_tensor(data, meta: RadioMeta, name: str) -> np.ndarray:
    """Return a validated, read-only complex128 tensor matching ``meta``."""
    arr = np.asarray(data)
    if arr.shape != meta.shape:
        raise ValidationError(
            f"{name} shape {arr.shape} does not match metadata {meta.shape}")
    adopt = (arr.dtype == np.complex128 and arr.flags.c_contiguous
             and not arr.flags.writeable)
    if not adopt:
        arr = np.array(arr, dtype=np.complex128, order="C")
        arr.setflags(write=False)
    check_finite(arr, name)
    return arr


@dataclass(frozen=True)
class CsiSampleSet:
    """Frequency-domain sample set: complex tensor indexed [t, i, j, m]."""

    meta: RadioMeta
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "data",
                           _freeze_tensor(self.data, self.meta, "CSI data"))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.meta.shape


@dataclass(frozen=True)
class CirSampleSet:
    """Delay-domain sample set: complex tensor indexed [t, i, j, k]."""

    meta: RadioMeta
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "data",
                           _freeze_tensor(self.data, self.meta, "CIR data"))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.meta.shape

    def bin_delays_s(self) -> np.ndarray:
        return bin_delays(self.meta)


def bin_delays(meta: RadioMeta) -> np.ndarray:
    """Signed circular delay of every CIR bin, in seconds.

    Bin ``k`` maps to ``k / (M * df)`` for ``k <= M // 2`` and to
    ``(k - M) / (M * df)`` otherwise, so the top bins carry negative delays.
    """
    m = meta.num_subcarriers
    k = np.arange(m)
    k = np.where(k <= m // 2, k, k - m)
    return k / (m * meta.subcarrier_spacing_hz)


def csi_to_cir(csi: CsiSampleSet) -> CirSampleSet:
    """Transform a CSI set to the delay domain (inverse DFT along m, 1/M)."""
    if not isinstance(csi, CsiSampleSet):
        raise ValidationError("csi_to_cir expects a CsiSampleSet")
    return CirSampleSet(csi.meta, np.fft.ifft(csi.data, axis=3))


def cir_to_csi(cir: CirSampleSet) -> CsiSampleSet:
    """Transform a CIR set back to the subcarrier domain (unscaled DFT)."""
    if not isinstance(cir, CirSampleSet):
        raise ValidationError("cir_to_csi expects a CirSampleSet")
    return CsiSampleSet(cir.meta, np.fft.fft(cir.data, axis=3))
