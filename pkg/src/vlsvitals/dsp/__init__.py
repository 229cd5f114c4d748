from .filters import (
    FilterChain,
    FilterCoefficients,
    StabilityVerdict,
    apply_filter,
    design_bandpass,
    frequency_response,
    identity_filter,
    iir_filter,
    paper_breathing_filter,
    paper_heart_filter,
)
from .pipeline import PipelineConfig, bpm_resolution, estimate_vitals, window_starts
from .spectral import BREATHING_BAND, HEART_BAND, BandSpec, apply_window, fft, hanning_window, peak_in_band

__all__ = [
    "BREATHING_BAND",
    "HEART_BAND",
    "BandSpec",
    "FilterChain",
    "FilterCoefficients",
    "PipelineConfig",
    "StabilityVerdict",
    "apply_filter",
    "apply_window",
    "bpm_resolution",
    "design_bandpass",
    "estimate_vitals",
    "fft",
    "frequency_response",
    "hanning_window",
    "identity_filter",
    "iir_filter",
    "paper_breathing_filter",
    "paper_heart_filter",
    "peak_in_band",
    "window_starts",
]
