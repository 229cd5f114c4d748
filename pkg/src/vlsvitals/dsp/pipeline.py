"""Windowed breathing and heart-rate estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..metrics import VitalKind, VitalsReport, WindowEstimate
from .filters import FilterChain, FilterCoefficients, apply_filter, design_bandpass
from .spectral import BREATHING_BAND, HEART_BAND, BandSpec, apply_window, band_bins, fft, hanning_window, is_power_of_two


@dataclass(frozen=True)
class PipelineConfig:
    """Estimation parameters.

    Filters default to Chebyshev type-II designs derived from the bands.
    ``remove_mean`` subtracts each window's mean before filtering so the
    large DC level does not excite the band-pass start-up transient.
    ``confidence_threshold`` flags a window whose in-band peak is not above
    that multiple of the median in-band magnitude.
    """

    sampling_rate: float = 100.0
    window_size: int = 2048
    window_overlap: float = 0.0
    breathing_band: BandSpec = BREATHING_BAND
    heart_band: BandSpec = HEART_BAND
    breathing_filter: FilterChain | None = None
    heart_filter: FilterChain | None = None
    confidence_threshold: float = 10.0
    warmup_s: float = 0.0
    remove_mean: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.sampling_rate) and self.sampling_rate > 0):
            raise ValidationError("sampling rate must be positive")
        if int(self.window_size) != self.window_size or not is_power_of_two(int(self.window_size)):
            raise ValidationError(f"window size must be a power of two, got {self.window_size!r}")
        if self.window_size < 2:
            raise ValidationError("window size must be at least 2")
        object.__setattr__(self, "window_size", int(self.window_size))
        if not 0.0 <= self.window_overlap < 1.0:
            raise ValidationError(f"window overlap must lie in [0, 1), got {self.window_overlap!r}")
        if self.breathing_band.kind is not VitalKind.BREATHING or self.heart_band.kind is not VitalKind.HEART:
            raise ValidationError("band kinds do not match their slots")
        for band in (self.breathing_band, self.heart_band):
            band.check_nyquist(self.sampling_rate)
        if not self.confidence_threshold >= 0:
            raise ValidationError("confidence threshold must be >= 0")
        if not (math.isfinite(self.warmup_s) and self.warmup_s >= 0):
            raise ValidationError("warm-up must be >= 0 seconds")
        for name, band in (("breathing_filter", self.breathing_band), ("heart_filter", self.heart_band)):
            filt = getattr(self, name)
            if filt is None:
                filt = design_bandpass(band, self.sampling_rate)
            elif isinstance(filt, FilterCoefficients):
                filt = FilterChain((filt,), label=filt.label)
            object.__setattr__(self, name, filt)

    @property
    def stride(self):
        return max(1, int(round(self.window_size * (1.0 - self.window_overlap))))

    def band(self, kind):
        return self.breathing_band if VitalKind(kind) is VitalKind.BREATHING else self.heart_band

    def filter(self, kind):
        return self.breathing_filter if VitalKind(kind) is VitalKind.BREATHING else self.heart_filter


def bpm_resolution(config):
    """Width of one FFT bin in BPM."""
    return config.sampling_rate / config.window_size * 60.0


def window_starts(n_samples, config):
    """Start indices of the analysis windows over ``n_samples`` samples."""
    n = config.window_size
    if n_samples < n:
        raise ValidationError(f"trace has {n_samples} samples, fewer than one window of {n}")
    return list(range(0, n_samples - n + 1, config.stride))


def _estimate_window(segment, kind, config, weights):
    band = config.band(kind)
    degenerate = np.ptp(segment) == 0
    if config.remove_mean:
        segment = segment - segment.mean()
    filtered = apply_filter(config.filter(kind), segment)
    spectrum = fft(apply_window(weights, filtered))
    bins = band_bins(spectrum.size, band, config.sampling_rate)
    mags = np.abs(spectrum[bins])
    k = int(bins[np.argmax(mags)])
    peak = float(mags.max())
    median = float(np.median(mags))
    ratio = peak / median if median > 0 else (math.inf if peak > 0 else 0.0)
    confident = bool(not degenerate and peak > config.confidence_threshold * median)
    return k, ratio, confident


def estimate_vitals(trace, config=None):
    """Estimate breathing and heart rate of ``trace`` window by window.

    Each window is filtered from zero initial conditions, Hann-weighted,
    transformed, and the largest in-band bin is converted to BPM. The
    trace's ground truth, when present, becomes the report's reference.
    """
    config = config or PipelineConfig()
    if not math.isclose(trace.sampling_rate, config.sampling_rate, rel_tol=1e-12):
        raise ValidationError(
            f"trace sampling rate {trace.sampling_rate:g} Hz does not match the pipeline's "
            f"{config.sampling_rate:g} Hz"
        )
    skip = int(round(config.warmup_s * config.sampling_rate))
    samples = np.asarray(trace.samples, dtype=float)[skip:]
    n = config.window_size
    weights = hanning_window(n)
    estimates = []
    for index, start in enumerate(window_starts(samples.size, config)):
        segment = samples[start:start + n]
        for kind in VitalKind:
            k, ratio, confident = _estimate_window(segment, kind, config, weights)
            bpm = k * config.sampling_rate / n * 60.0
            estimates.append(WindowEstimate(index, kind, start + skip, bpm, k, ratio, confident))
    report = VitalsReport(tuple(estimates), bpm_resolution(config))
    if trace.truth is not None:
        report = report.with_reference(*trace.truth)
    return report
