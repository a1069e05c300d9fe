"""Breathing-rate estimation from WiFi OFDM MIMO channel state information.

The package covers the full chain: a multipath channel simulator with a
breathing chest path and receiver distortions, amplitude/phase calibration,
candidate selection, conditioning filters, rate detection, six assembled
estimation systems, on-disk formats, and an evaluation harness.
"""

from .calibration import (AmplitudeCalibrator, LinearPhaseFit,
                          PhaseCalibrator, PhaseDifference,
                          amplitude_calibrate, fit_linear_phase,
                          phase_calibrate, phase_difference)
from .core import (CirSampleSet, CsiSampleSet, RadioMeta, bin_delays,
                   cir_to_csi, csi_to_cir)
from .dataio import (GroundTruthTrack, load_scenario,
                     load_system_config, read_recording, read_truth,
                     reduce_dataset, save_system_config,
                     sliding_windows, write_recording, write_truth)
from .detection import (BreathingEstimate, band_mask, peak_detect, psd,
                        psd_detect)
from .evaluation import (ComparisonReport, ErrorReport, compare_systems,
                         evaluate)
from .exceptions import (EstimationError, PipelineStageError,
                         RecordingFormatError, ScenarioFormatError,
                         TruthCoverageError, ValidationError)
from .filters import (DelayFilter, WaveletDecomp, band_pass,
                      decomposition_level, delay_filter, dwt_db4_approx,
                      hampel_detrend, wavelet_decompose,
                      wavelet_reconstruct)
from .selection import (BoiConfig, Candidate, STABILITY_THRESHOLD,
                        boi_select, is_stable, mad_select,
                        mean_abs_deviation, stability_score)
from .simulate import (BreathingMotion, DistortionSpec, PathSpec, Scenario,
                       apply_distortion, draw_distortions, simulate,
                       synth_clean)
from .systems import (BreathingRateEstimator, SYSTEM_NAMES, SystemConfig,
                      list_systems, run_window)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeCalibrator", "BoiConfig", "BreathingEstimate",
    "BreathingMotion", "BreathingRateEstimator", "Candidate",
    "CirSampleSet", "ComparisonReport", "CsiSampleSet", "DelayFilter",
    "DistortionSpec", "ErrorReport", "EstimationError", "GroundTruthTrack",
    "LinearPhaseFit", "PathSpec", "PhaseCalibrator", "PhaseDifference",
    "PipelineStageError", "RadioMeta", "RecordingFormatError",
    "STABILITY_THRESHOLD", "SYSTEM_NAMES", "Scenario",
    "ScenarioFormatError", "SystemConfig", "TruthCoverageError",
    "ValidationError", "WaveletDecomp", "amplitude_calibrate",
    "apply_distortion", "band_mask", "band_pass", "bin_delays",
    "boi_select", "cir_to_csi", "compare_systems", "csi_to_cir",
    "decomposition_level", "delay_filter", "draw_distortions",
    "dwt_db4_approx", "evaluate", "fit_linear_phase", "hampel_detrend",
    "is_stable", "list_systems", "load_scenario", "load_system_config",
    "mad_select",
    "mean_abs_deviation", "peak_detect", "phase_calibrate",
    "phase_difference", "psd", "psd_detect", "read_recording",
    "read_truth", "reduce_dataset", "run_window",
    "save_system_config", "simulate",
    "sliding_windows", "stability_score", "synth_clean",
    "wavelet_decompose", "wavelet_reconstruct", "write_recording",
    "write_truth",
]
