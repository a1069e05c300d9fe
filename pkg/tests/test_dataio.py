"""Recording format, truth tracks, scenario files, windows, reduction."""

import struct

import numpy as np
import pytest

import csibreath as cb
from csibreath.dataio import _HEADER, RECORDING_MAGIC
from conftest import breathing_scenario, random_sample_set


# --- recording round trips ------------------------------------------------------

def test_write_read_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    original = random_sample_set(rng)
    path = tmp_path / "rec.csir"
    cb.write_recording(original, path)
    loaded = cb.read_recording(path)
    assert loaded.meta == original.meta
    assert np.array_equal(loaded.data, original.data)


def test_write_of_read_is_byte_identical(tmp_path):
    rng = np.random.default_rng(1)
    first = tmp_path / "a.csir"
    second = tmp_path / "b.csir"
    cb.write_recording(random_sample_set(rng), first)
    cb.write_recording(cb.read_recording(first), second)
    assert first.read_bytes() == second.read_bytes()


def _valid_file_bytes():
    rng = np.random.default_rng(2)
    sample = random_sample_set(rng, shape=(3, 1, 2, 4))
    header = _HEADER.pack(RECORDING_MAGIC, 1, ord("<"), 1, 3, 1, 2, 4,
                          9.9, 703125.0, 5.32e9)
    payload = np.ascontiguousarray(sample.data, dtype="<c8").tobytes()
    return header, payload


def test_bad_magic(tmp_path):
    header, payload = _valid_file_bytes()
    path = tmp_path / "x.csir"
    path.write_bytes(b"NOPE" + header[4:] + payload)
    with pytest.raises(cb.RecordingFormatError) as excinfo:
        cb.read_recording(path)
    assert excinfo.value.code == cb.RecordingFormatError.BAD_MAGIC


def test_bad_version(tmp_path):
    header, payload = _valid_file_bytes()
    bad = header[:4] + struct.pack("<H", 9) + header[6:]
    path = tmp_path / "x.csir"
    path.write_bytes(bad + payload)
    with pytest.raises(cb.RecordingFormatError) as excinfo:
        cb.read_recording(path)
    assert excinfo.value.code == cb.RecordingFormatError.BAD_VERSION


def test_truncated_payload_names_byte_counts(tmp_path):
    header, payload = _valid_file_bytes()
    path = tmp_path / "x.csir"
    path.write_bytes(header + payload[:-8])
    with pytest.raises(cb.RecordingFormatError) as excinfo:
        cb.read_recording(path)
    assert excinfo.value.code == cb.RecordingFormatError.TRUNCATED
    expected = 3 * 1 * 2 * 4 * 8
    assert str(expected) in str(excinfo.value)
    assert str(expected - 8) in str(excinfo.value)


def test_trailing_bytes_rejected(tmp_path):
    header, payload = _valid_file_bytes()
    path = tmp_path / "x.csir"
    path.write_bytes(header + payload + b"xx")
    with pytest.raises(cb.RecordingFormatError) as excinfo:
        cb.read_recording(path)
    assert excinfo.value.code == cb.RecordingFormatError.TRAILING


def test_zero_subcarriers_header_rejected(tmp_path):
    header = _HEADER.pack(RECORDING_MAGIC, 1, ord("<"), 1, 3, 1, 2, 0,
                          9.9, 703125.0, 5.32e9)
    path = tmp_path / "x.csir"
    path.write_bytes(header)
    with pytest.raises(cb.ValidationError):
        cb.read_recording(path)


def test_nonfinite_payload_rejected(tmp_path):
    header, payload = _valid_file_bytes()
    corrupted = bytearray(payload)
    corrupted[0:4] = struct.pack("<f", np.nan)
    path = tmp_path / "x.csir"
    path.write_bytes(header + bytes(corrupted))
    with pytest.raises(cb.RecordingFormatError) as excinfo:
        cb.read_recording(path)
    assert excinfo.value.code == cb.RecordingFormatError.NONFINITE


def test_header_too_short(tmp_path):
    path = tmp_path / "x.csir"
    path.write_bytes(b"CSI")
    with pytest.raises(cb.RecordingFormatError) as excinfo:
        cb.read_recording(path)
    assert excinfo.value.code == cb.RecordingFormatError.TRUNCATED


# --- ground-truth tracks ---------------------------------------------------------

def test_truth_round_trip(tmp_path):
    track = cb.GroundTruthTrack(np.arange(5.0), np.full(5, 0.25))
    path = tmp_path / "truth.txt"
    cb.write_truth(track, path)
    loaded = cb.read_truth(path)
    assert np.allclose(loaded.times_s, track.times_s)
    assert np.allclose(loaded.rates_hz, track.rates_hz)


def test_truth_nearest_row_lookup():
    track = cb.GroundTruthTrack(np.array([0.0, 1.0, 2.0]),
                                np.array([0.2, 0.3, 0.4]))
    assert track.rate_at(0.9) == 0.3
    assert track.rate_at(10.0) == 0.4


def test_truth_validation():
    with pytest.raises(cb.ValidationError):
        cb.GroundTruthTrack(np.array([0.0, 0.0]), np.array([0.2, 0.3]))
    with pytest.raises(cb.ValidationError):
        cb.GroundTruthTrack(np.array([0.0, 1.0]), np.array([0.2, -0.3]))


def test_truth_parse_error_names_line(tmp_path):
    path = tmp_path / "truth.txt"
    path.write_text("0.0 0.25\nbogus line here\n")
    with pytest.raises(cb.ValidationError, match="line 2"):
        cb.read_truth(path)


# --- sliding windows -------------------------------------------------------------

def test_canonical_window_is_297_snapshots():
    rec = cb.simulate(breathing_scenario(snapshots=297))
    windows = cb.sliding_windows(rec, 30.0, 1.0)
    assert len(windows) == 1
    assert windows[0].meta.num_snapshots == 297


def test_two_windows_at_306_snapshots():
    rec = cb.simulate(breathing_scenario(snapshots=306))
    windows = cb.sliding_windows(rec, 30.0, 1.0)
    assert len(windows) == 2
    # Window k starts at k * floor(step * f_s) exactly.
    assert np.array_equal(windows[1].data, rec.data[9:306])


def test_windows_share_the_recording_buffer():
    rec = cb.simulate(breathing_scenario(snapshots=306))
    windows = cb.sliding_windows(rec, 30.0, 1.0)
    assert all(np.shares_memory(w.data, rec.data) for w in windows)


def test_window_shorter_than_two_snapshots_rejected():
    rec = cb.simulate(breathing_scenario(snapshots=297))
    with pytest.raises(cb.ValidationError):
        cb.sliding_windows(rec, 0.1, 1.0)


# --- dataset reduction -----------------------------------------------------------

def _wide_set(m=114, n_tx=2):
    meta = cb.RadioMeta(6, n_tx, 2, m, 9.9, 312500.0, 5.32e9)
    rng = np.random.default_rng(3)
    data = rng.standard_normal(meta.shape) + 1j * rng.standard_normal(meta.shape)
    return cb.CsiSampleSet(meta, data)


def test_reduce_114_to_29():
    wide = _wide_set()
    reduced = cb.reduce_dataset(wide, keep_tx=1, subcarrier_stride=2,
                                half="upper")
    assert reduced.meta.num_subcarriers == 29
    assert reduced.meta.num_tx == 1
    assert reduced.meta.subcarrier_spacing_hz == 625000.0
    assert np.array_equal(reduced.data[:, 0], wide.data[:, 1, :, 57::2])


def test_reduce_stride_one_full_band_keeps_subcarriers():
    wide = _wide_set()
    reduced = cb.reduce_dataset(wide, keep_tx=0)
    assert reduced.meta.num_subcarriers == 114
    assert np.array_equal(reduced.data, wide.data[:, :1])


def test_reduce_lower_half_of_30():
    wide = _wide_set(m=30, n_tx=1)
    reduced = cb.reduce_dataset(wide, 0, 2, "lower")
    assert reduced.meta.num_subcarriers == 8
    assert np.array_equal(reduced.data, wide.data[:, :1, :, :15:2])


def test_reduce_is_idempotent_after_first_pass():
    wide = _wide_set()
    once = cb.reduce_dataset(wide, 0, 1, None)
    twice = cb.reduce_dataset(once, 0, 1, None)
    assert np.array_equal(once.data, twice.data)
    assert once.meta == twice.meta


def test_reduce_keep_tx_out_of_range():
    with pytest.raises(cb.ValidationError):
        cb.reduce_dataset(_wide_set(), keep_tx=5)


# --- scenario files --------------------------------------------------------------

SCENARIO_TEXT = """\
# two antennas, one breathing path
[radio]
snapshots = 297
tx = 1
rx = 2
subcarriers = 29
snapshot_rate_hz = 9.9
subcarrier_spacing_hz = 703125.0
carrier_freq_hz = 5.32e9

[motion]
rate_hz = 0.25

[distortion]
agc_min = 0.5
agc_max = 2.0
phase_slope_min = -0.1
phase_slope_max = 0.1
phase_intercept_min = -3.141592653589793
phase_intercept_max = 3.141592653589793
noise_snr_db = 30.0
seed = 7

[path los]
attenuation = 1.0
delay_s = 1.5e-8

[path chest]
attenuation = 0.1+0.05j
delay_s = 3.5e-8
dynamic = true

[path rx1 reflector]
attenuation = 0.2
delay_s = 4.5e-8
rx = 1
"""


def test_scenario_file_parses(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(SCENARIO_TEXT)
    scenario = cb.load_scenario(path)
    assert scenario.meta.num_snapshots == 297
    assert scenario.motion.rate_hz == 0.25
    assert scenario.distortion.rng_seed == 7
    assert scenario.distortion.noise_snr_db == 30.0
    assert len(scenario.paths[(0, 0)]) == 2
    assert len(scenario.paths[(0, 1)]) == 3  # rx-restricted reflector
    assert scenario.paths[(0, 1)][1].attenuation == 0.1 + 0.05j
    rec = cb.simulate(scenario)
    assert rec.shape == (297, 1, 2, 29)


@pytest.mark.parametrize("mutation, line", [
    ("[radio", 2),                    # unterminated header
    ("rate_hz 0.25", 12),             # missing '='
    ("unknown_key = 3", None),        # unknown key in [radio]
])
def test_scenario_errors_name_lines(tmp_path, mutation, line):
    lines = SCENARIO_TEXT.splitlines()
    if mutation.startswith("[radio"):
        lines[1] = mutation
    elif mutation.startswith("rate_hz"):
        lines[11] = mutation
    else:
        lines.insert(2, mutation)
    path = tmp_path / "broken.cfg"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(cb.ScenarioFormatError) as excinfo:
        cb.load_scenario(path)
    if line is not None:
        assert f"line {line}" in str(excinfo.value)


def test_scenario_duplicate_section(tmp_path):
    path = tmp_path / "dup.cfg"
    path.write_text(SCENARIO_TEXT + "\n[radio]\nsnapshots = 1\n")
    with pytest.raises(cb.ScenarioFormatError, match="duplicate"):
        cb.load_scenario(path)


def test_scenario_missing_radio(tmp_path):
    path = tmp_path / "bare.cfg"
    path.write_text("[path a]\nattenuation = 1\ndelay_s = 0\n")
    with pytest.raises(cb.ScenarioFormatError, match="radio"):
        cb.load_scenario(path)


def test_scenario_snr_none(tmp_path):
    text = SCENARIO_TEXT.replace("noise_snr_db = 30.0",
                                 "noise_snr_db = none")
    path = tmp_path / "quiet.cfg"
    path.write_text(text)
    assert cb.load_scenario(path).distortion.noise_snr_db is None


def test_scenario_bad_value_reports_line(tmp_path):
    text = SCENARIO_TEXT.replace("snapshots = 297", "snapshots = lots")
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(cb.ScenarioFormatError, match="line 3"):
        cb.load_scenario(path)


# --- system-config files ----------------------------------------------------------

def test_system_config_round_trip(tmp_path):
    cfg = cb.SystemConfig("complexbeat-csi-df", q_threshold=0.3,
                          fit_window=6)
    path = tmp_path / "system.cfg"
    cb.save_system_config(cfg, path)
    assert cb.load_system_config(path) == cfg


def test_system_config_partial_file_uses_defaults(tmp_path):
    path = tmp_path / "system.cfg"
    path.write_text("[system]\nname = phasebeat\nq_threshold = 0.25\n")
    cfg = cb.load_system_config(path)
    assert cfg.name == "phasebeat"
    assert cfg.q_threshold == 0.25
    assert cfg.hampel_window_s == 5.0


def test_system_config_unknown_key_rejected(tmp_path):
    path = tmp_path / "system.cfg"
    path.write_text("[system]\nname = phasebeat\nwhatever = 3\n")
    with pytest.raises(cb.ScenarioFormatError, match="line 3"):
        cb.load_system_config(path)
