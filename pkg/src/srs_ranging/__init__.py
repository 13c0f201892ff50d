"""5G NR SRS-based OFDM radar ranging: waveform, channel and estimator."""

from .channel import ChannelConfig, PathSpec, apply_channel, two_path_factory
from .estimator import SrsRangeEstimator
from .exceptions import (
    CaptureFormatError,
    ChannelError,
    ConfigError,
    NoSignalError,
    ShapeError,
    SrsRangingError,
    UnresolvedPeaksError,
)
from .harness import EstimatorOptions, TrialSpec, min_bandwidth, process_capture, run_trial, sweep_bandwidth
from .nr_config import (
    SPEED_OF_LIGHT,
    CarrierConfig,
    Numerology,
    SrsConfig,
    occupied_bandwidth,
    slot_timing,
    subcarrier_spacing,
    validate_srs,
)
from .ofdm_modem import BasebandWaveform, demodulate, detect_start, modulate
from .range_estimator import czt_refine, equalize, estimate_range, find_two_peaks, range_profile
from .srs_sequence import ResourceGrid, generate_srs_grid, papr_db, zadoff_chu_base

__version__ = "0.1.0"
