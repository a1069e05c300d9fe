"""On-disk formats and the sliding-window iterator.

Recording format (extension-agnostic, magic ``CSIR``), all little-endian:

    offset  size  field
    0       4     magic "CSIR"
    4       2     format version (uint16, currently 1)
    6       1     byte-order tag (ASCII '<', little-endian)
    7       1     sample-layout tag (1 = float32 pairs, real then imag)
    8       8     snapshot count T (uint64)
    16      4     TX antenna count (uint32)
    20      4     RX antenna count (uint32)
    24      4     subcarrier count M (uint32)
    28      8     snapshot rate, Hz (float64)
    36      8     subcarrier spacing, Hz (float64)
    44      8     carrier frequency, Hz (float64)
    52      -     payload: T*N_T*N_R*M complex64 entries, row-major
                  [t][i][j][m], each entry two float32 (real, imag)

Ground-truth tracks are plain text, two whitespace-separated columns
``time_s rate_hz``, one row per second, ``#`` comments allowed.

Scenario files are line-oriented ``key = value`` under ``[section]``
headers; grammar documented in the README and enforced with per-line error
reporting.  Sections: ``[radio]``, optional ``[motion]`` and
``[distortion]``, and one ``[path <label>]`` per propagation path (paths
apply to every antenna pair unless restricted with ``tx =`` / ``rx =``).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields, replace

import numpy as np

from .core import CsiSampleSet, RadioMeta
from .exceptions import (RecordingFormatError, ScenarioFormatError,
                         ValidationError)
from .simulate import (BreathingMotion, DistortionSpec, PathSpec, Scenario)
from .systems import SystemConfig
from .validation import require

RECORDING_MAGIC = b"CSIR"
RECORDING_VERSION = 1
_BYTE_ORDER_TAG = ord("<")
_LAYOUT_FLOAT32_PAIRS = 1
_HEADER = struct.Struct("<4sHBBQIIIddd")
_SAMPLE_DTYPE = np.dtype("<c8")  # two float32, real then imaginary


def write_recording(sample_set: CsiSampleSet, path) -> None:
    """Write a sample set in the binary recording format."""
    meta = sample_set.meta
    header = _HEADER.pack(
        RECORDING_MAGIC, RECORDING_VERSION, _BYTE_ORDER_TAG,
        _LAYOUT_FLOAT32_PAIRS, meta.num_snapshots, meta.num_tx, meta.num_rx,
        meta.num_subcarriers, meta.snapshot_rate_hz,
        meta.subcarrier_spacing_hz, meta.carrier_freq_hz)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(sample_set.data,
                                      dtype=_SAMPLE_DTYPE).tobytes())


def read_recording(path) -> CsiSampleSet:
    """Read a recording, rejecting malformed files with distinct codes."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise RecordingFormatError(
            RecordingFormatError.TRUNCATED,
            f"file holds {len(blob)} bytes, shorter than the "
            f"{_HEADER.size}-byte header")
    (magic, version, byte_order, layout, t_count, n_tx, n_rx, m_count,
     f_s, spacing, carrier) = _HEADER.unpack_from(blob)
    if magic != RECORDING_MAGIC:
        raise RecordingFormatError(
            RecordingFormatError.BAD_MAGIC,
            f"bad magic {magic!r}, expected {RECORDING_MAGIC!r}")
    if version != RECORDING_VERSION:
        raise RecordingFormatError(
            RecordingFormatError.BAD_VERSION,
            f"unsupported format version {version}")
    if byte_order != _BYTE_ORDER_TAG or layout != _LAYOUT_FLOAT32_PAIRS:
        raise RecordingFormatError(
            RecordingFormatError.BAD_HEADER,
            f"unsupported byte order / layout tags ({byte_order}, {layout})")
    meta = RadioMeta(t_count, n_tx, n_rx, m_count, f_s, spacing, carrier)
    expected = t_count * n_tx * n_rx * m_count * _SAMPLE_DTYPE.itemsize
    actual = len(blob) - _HEADER.size
    if actual < expected:
        raise RecordingFormatError(
            RecordingFormatError.TRUNCATED,
            f"truncated payload: expected {expected} bytes, got {actual}")
    if actual > expected:
        raise RecordingFormatError(
            RecordingFormatError.TRAILING,
            f"trailing bytes after payload: expected {expected} bytes, "
            f"got {actual}")
    samples = np.frombuffer(blob, dtype=_SAMPLE_DTYPE,
                            offset=_HEADER.size).astype(np.complex128)
    if not np.isfinite(samples.view(np.float64)).all():
        raise RecordingFormatError(
            RecordingFormatError.NONFINITE,
            "payload contains NaN or Inf samples")
    return CsiSampleSet(meta, samples.reshape(meta.shape))


@dataclass(frozen=True)
class GroundTruthTrack:
    """Reference breathing rate over time: rows of (time_s, rate_hz)."""

    times_s: np.ndarray
    rates_hz: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times_s, dtype=np.float64)
        rates = np.asarray(self.rates_hz, dtype=np.float64)
        require(times.ndim == 1 and rates.ndim == 1,
                "truth columns must be 1-D")
        require(times.size == rates.size and times.size >= 1,
                "truth track needs matching, nonempty columns")
        require(bool(np.all(np.diff(times) > 0)),
                "truth times must be strictly increasing")
        require(bool(np.all(rates > 0)), "truth rates must be positive")
        require(bool(np.all(np.isfinite(times))
                     and np.all(np.isfinite(rates))),
                "truth track must be finite")
        object.__setattr__(self, "times_s", times)
        object.__setattr__(self, "rates_hz", rates)

    @classmethod
    def constant(cls, rate_hz: float, duration_s: float,
                 step_s: float = 1.0) -> "GroundTruthTrack":
        times = np.arange(0.0, duration_s + step_s / 2, step_s)
        return cls(times, np.full(times.shape, rate_hz))

    def rate_at(self, time_s: float) -> float:
        """Rate of the row nearest in time."""
        return float(self.rates_hz[np.argmin(np.abs(self.times_s - time_s))])

    @property
    def span_s(self) -> tuple[float, float]:
        return float(self.times_s[0]), float(self.times_s[-1])


def write_truth(track: GroundTruthTrack, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# time_s rate_hz\n")
        for t, r in zip(track.times_s, track.rates_hz):
            fh.write(f"{t:.6f} {r:.9f}\n")


def read_truth(path) -> GroundTruthTrack:
    times = []
    rates = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError(
                    f"{path}: line {lineno}: expected 'time_s rate_hz', "
                    f"got {raw.strip()!r}")
            try:
                times.append(float(parts[0]))
                rates.append(float(parts[1]))
            except ValueError as exc:
                raise ValidationError(
                    f"{path}: line {lineno}: {exc}") from exc
    if not times:
        raise ValidationError(f"{path}: truth track is empty")
    return GroundTruthTrack(np.asarray(times), np.asarray(rates))


def snapshot_count(f_s: float, seconds: float) -> int:
    """Number of snapshots spanned by ``seconds`` at rate ``f_s``."""
    return int(np.floor(seconds * f_s))


def sliding_windows(sample_set: CsiSampleSet, window_s: float = 30.0,
                    step_s: float = 1.0) -> list[CsiSampleSet]:
    """Cut a recording into fixed-size windows; partial tails are dropped.

    Window k starts at snapshot ``k * floor(step_s * f_s)`` and spans
    ``floor(window_s * f_s)`` snapshots.  The windows share the recording's
    buffer (no copies).
    """
    meta = sample_set.meta
    width = snapshot_count(meta.snapshot_rate_hz, window_s)
    hop = snapshot_count(meta.snapshot_rate_hz, step_s)
    require(width >= 2, "window must span at least 2 snapshots")
    require(hop >= 1, "step must span at least 1 snapshot")
    window_meta = replace(meta, num_snapshots=width)
    return [CsiSampleSet(window_meta, sample_set.data[start:start + width])
            for start in range(0, meta.num_snapshots - width + 1, hop)]


def reduce_dataset(sample_set: CsiSampleSet, keep_tx: int = 0,
                   subcarrier_stride: int = 1,
                   half: str | None = None) -> CsiSampleSet:
    """Keep one TX antenna and a decimated part of the subcarrier axis.

    ``half`` selects the lower- or higher-index half of the subcarrier axis
    ("lower" / "upper"; the upper half is the larger one for odd M) or the
    full band (None); ``subcarrier_stride`` then keeps every stride-th
    subcarrier starting from the first kept index.  The subcarrier spacing
    in the metadata is multiplied by the stride.
    """
    meta = sample_set.meta
    if not 0 <= keep_tx < meta.num_tx:
        raise ValidationError(
            f"keep_tx {keep_tx} out of range for {meta.num_tx} TX antennas")
    require(subcarrier_stride >= 1, "subcarrier_stride must be >= 1")
    if half not in (None, "upper", "lower"):
        raise ValidationError("half must be 'upper', 'lower' or None")
    data = sample_set.data[:, keep_tx:keep_tx + 1]
    split = meta.num_subcarriers // 2
    if half == "upper":
        data = data[..., split:]
    elif half == "lower":
        data = data[..., :split]
    data = data[..., ::subcarrier_stride]
    new_meta = replace(
        meta, num_tx=1, num_subcarriers=data.shape[3],
        subcarrier_spacing_hz=meta.subcarrier_spacing_hz * subcarrier_stride)
    return CsiSampleSet(new_meta, data)


# --- scenario files ---------------------------------------------------------


def _parse_sections(path):
    """Parse ``[section]`` / ``key = value`` lines into an ordered mapping."""
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: dict[str, tuple[str, int]] | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    raise ScenarioFormatError("unterminated section header",
                                              lineno)
                name = line[1:-1].strip()
                if not name:
                    raise ScenarioFormatError("empty section name", lineno)
                if name in sections:
                    raise ScenarioFormatError(
                        f"duplicate section [{name}]", lineno)
                current = {}
                sections[name] = current
                continue
            if "=" not in line:
                raise ScenarioFormatError(
                    f"expected 'key = value', got {line!r}", lineno)
            if current is None:
                raise ScenarioFormatError(
                    "key/value outside any [section]", lineno)
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not key:
                raise ScenarioFormatError("empty key", lineno)
            if key in current:
                raise ScenarioFormatError(f"duplicate key {key!r}", lineno)
            current[key] = (value, lineno)
    return sections


_REQUIRED = object()


class _Section:
    """Typed access to one parsed section with line-accurate errors."""

    def __init__(self, name: str, entries: dict[str, tuple[str, int]]):
        self.name = name
        self.entries = dict(entries)

    def take(self, key: str, cast, default=_REQUIRED):
        if key not in self.entries:
            if default is _REQUIRED:
                raise ScenarioFormatError(
                    f"section [{self.name}] is missing key {key!r}")
            return default
        value, lineno = self.entries.pop(key)
        try:
            return cast(value)
        except (TypeError, ValueError) as exc:
            raise ScenarioFormatError(
                f"key {key!r}: {exc}", lineno) from exc

    def finish(self):
        if self.entries:
            key = next(iter(self.entries))
            raise ScenarioFormatError(
                f"unknown key {key!r} in section [{self.name}]",
                self.entries[key][1])


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _parse_optional_float(value: str) -> float | None:
    return None if value.lower() == "none" else float(value)


def load_scenario(path) -> Scenario:
    """Load a simulator scenario from its config-file form."""
    sections = _parse_sections(path)

    if "radio" not in sections:
        raise ScenarioFormatError("missing required section [radio]")
    radio = _Section("radio", sections.pop("radio"))
    meta = RadioMeta(
        num_snapshots=radio.take("snapshots", int),
        num_tx=radio.take("tx", int),
        num_rx=radio.take("rx", int),
        num_subcarriers=radio.take("subcarriers", int),
        snapshot_rate_hz=radio.take("snapshot_rate_hz", float),
        subcarrier_spacing_hz=radio.take("subcarrier_spacing_hz", float),
        carrier_freq_hz=radio.take("carrier_freq_hz", float))
    radio.finish()

    motion = None
    if "motion" in sections:
        sec = _Section("motion", sections.pop("motion"))
        motion = BreathingMotion(
            rate_hz=sec.take("rate_hz", float),
            delay_amplitude_s=sec.take(
                "delay_amplitude_s", float,
                BreathingMotion.__dataclass_fields__[
                    "delay_amplitude_s"].default),
            phase_rad=sec.take("phase_rad", float, 0.0))
        sec.finish()

    distortion = DistortionSpec()
    if "distortion" in sections:
        sec = _Section("distortion", sections.pop("distortion"))
        distortion = DistortionSpec(
            agc_range=(sec.take("agc_min", float, 1.0),
                       sec.take("agc_max", float, 1.0)),
            phase_slope_range=(sec.take("phase_slope_min", float, 0.0),
                               sec.take("phase_slope_max", float, 0.0)),
            phase_intercept_range=(
                sec.take("phase_intercept_min", float, 0.0),
                sec.take("phase_intercept_max", float, 0.0)),
            noise_snr_db=sec.take("noise_snr_db", _parse_optional_float,
                                  None),
            rng_seed=sec.take("seed", int, 0))
        sec.finish()

    shared: list[PathSpec] = []
    restricted: list[tuple[int | None, int | None, PathSpec]] = []
    for name in list(sections):
        if not name.startswith("path"):
            raise ScenarioFormatError(f"unknown section [{name}]")
        sec = _Section(name, sections.pop(name))
        spec = PathSpec(
            attenuation=sec.take("attenuation", complex),
            delay_s=sec.take("delay_s", float),
            dynamic=sec.take("dynamic", _parse_bool, False))
        tx = sec.take("tx", int, None)
        rx = sec.take("rx", int, None)
        sec.finish()
        if tx is None and rx is None:
            shared.append(spec)
        else:
            restricted.append((tx, rx, spec))
    if not shared and not restricted:
        raise ScenarioFormatError("scenario defines no [path ...] sections")

    paths = {}
    for i in range(meta.num_tx):
        for j in range(meta.num_rx):
            pair = list(shared)
            pair += [spec for tx, rx, spec in restricted
                     if tx in (None, i) and rx in (None, j)]
            paths[(i, j)] = tuple(pair)
    return Scenario(meta, paths, motion, distortion)


# --- system config files -----------------------------------------------------


def save_system_config(cfg: SystemConfig, path) -> None:
    """Write a system configuration in the ``[system]`` key/value form."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("[system]\n")
        for spec in fields(SystemConfig):
            fh.write(f"{spec.name} = {getattr(cfg, spec.name)}\n")


def load_system_config(path) -> SystemConfig:
    """Load a system configuration; missing keys fall back to defaults."""
    sections = _parse_sections(path)
    if "system" not in sections:
        raise ScenarioFormatError("missing required section [system]")
    section = _Section("system", sections.pop("system"))
    if sections:
        raise ScenarioFormatError(
            f"unknown section [{next(iter(sections))}]")
    casts = {"int": int, "float": float, "str": str}
    kwargs = {"name": section.take("name", str)}
    for spec in fields(SystemConfig):
        if spec.name == "name" or spec.name not in section.entries:
            continue
        kwargs[spec.name] = section.take(spec.name, casts[spec.type])
    section.finish()
    return SystemConfig(**kwargs)
