"""Cooperative sense-and-avoid receiver for Mode S DF4 replies.

A small UAV listens to the DF4 altitude replies of nearby aircraft and, from
a single reply, estimates radial velocity (carrier phase slope), elevation
and azimuth (2D-MUSIC on a planar array), and range (elevation plus the
reported altitude, with a round-trip-time fallback), then assigns a risk
class to each intruder.
"""

__version__ = "0.1.0"

from .aoa import ScanSector, eigendecompose, estimate_aoa, music_spectrum, sample_correlation
from .channel import ArrayGeometry, ChannelParams, SampledSignal, apply_channel
from .classify import RiskClass, SafetyThresholds, classify
from .doppler import estimate_doppler, extract_phases, max_unambiguous_doppler, separate_drift
from .frames import Df4Frame, build_frame, check_crc, crc24, decode_altitude, encode_altitude
from .pipeline import ChannelConfig, Obstacle, Scenario, UavState, run_saa, reference_scenario
from .ranging import RangeMethod, range_rtt, range_triangular, select_range
from .sync_detect import detect_symbols, estimate_timing
from .waveform import FilterSpec, PulseSpec, ReceiverSetup

__all__ = [
    "ArrayGeometry",
    "ChannelConfig",
    "ChannelParams",
    "Df4Frame",
    "FilterSpec",
    "Obstacle",
    "PulseSpec",
    "RangeMethod",
    "ReceiverSetup",
    "RiskClass",
    "SafetyThresholds",
    "SampledSignal",
    "ScanSector",
    "Scenario",
    "UavState",
    "apply_channel",
    "build_frame",
    "check_crc",
    "classify",
    "crc24",
    "decode_altitude",
    "detect_symbols",
    "eigendecompose",
    "encode_altitude",
    "estimate_aoa",
    "estimate_doppler",
    "estimate_timing",
    "extract_phases",
    "max_unambiguous_doppler",
    "music_spectrum",
    "range_rtt",
    "range_triangular",
    "run_saa",
    "sample_correlation",
    "select_range",
    "separate_drift",
    "reference_scenario",
]
