"""Windowing, radix-2 FFT and in-band peak picking."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ValidationError
from ..metrics import VitalKind


@dataclass(frozen=True)
class BandSpec:
    """Physiological search band in beats (or breaths) per minute."""

    low_bpm: float
    high_bpm: float
    kind: VitalKind

    def __post_init__(self):
        object.__setattr__(self, "kind", VitalKind(self.kind))
        if not (math.isfinite(self.low_bpm) and math.isfinite(self.high_bpm)):
            raise ValidationError("band edges must be finite")
        if not 0 < self.low_bpm < self.high_bpm:
            raise ValidationError(f"band needs 0 < low < high, got {self.low_bpm!r}..{self.high_bpm!r} BPM")

    @property
    def low_hz(self):
        return self.low_bpm / 60.0

    @property
    def high_hz(self):
        return self.high_bpm / 60.0

    def check_nyquist(self, sampling_rate):
        if self.high_hz >= sampling_rate / 2:
            raise ValidationError(
                f"{self.kind.value} band upper edge {self.high_bpm:g} BPM is not below Nyquist "
                f"for {sampling_rate:g} Hz"
            )


BREATHING_BAND = BandSpec(10.0, 60.0, VitalKind.BREATHING)
HEART_BAND = BandSpec(30.0, 200.0, VitalKind.HEART)


def hanning_window(size):
    """Weights ``sin(pi m / N)**2`` for ``m = 0 .. N-1``."""
    if int(size) != size or size < 2:
        raise DomainError(f"window size must be an integer >= 2, got {size!r}")
    m = np.arange(int(size))
    return np.sin(np.pi * m / size) ** 2


def apply_window(weights, signal):
    w = np.asarray(weights, dtype=float)
    x = np.asarray(signal)
    if w.shape != x.shape:
        raise ValidationError(f"window length {w.size} does not match signal length {x.size}")
    return w * x


def is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


def _bit_reversal(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft(signal):
    """Unscaled forward DFT ``Y[k] = sum y[m] exp(-2j pi k m / N)``.

    Iterative radix-2 decimation in time; the length must be a power of two.
    """
    x = np.asarray(signal, dtype=complex)
    if x.ndim != 1:
        raise ValidationError("fft input must be 1-D")
    n = x.size
    if not is_power_of_two(n):
        raise DomainError(f"fft length must be a power of two, got {n}")
    y = x[_bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = y.reshape(-1, size)
        even = blocks[:, :half]
        odd = blocks[:, half:] * twiddle
        y = np.concatenate((even + odd, even - odd), axis=1).reshape(n)
        size *= 2
    return y


def band_bins(n, band, sampling_rate):
    """Indices ``k`` in ``[1, N/2]`` whose centre ``k fs / N`` lies in the band."""
    band.check_nyquist(sampling_rate)
    k = np.arange(1, n // 2 + 1)
    freqs = k * sampling_rate / n
    bins = k[(freqs >= band.low_hz) & (freqs <= band.high_hz)]
    if bins.size == 0:
        raise ValidationError(
            f"{band.kind.value} band {band.low_bpm:g}-{band.high_bpm:g} BPM holds no FFT bin "
            f"for N={n}, fs={sampling_rate:g}"
        )
    return bins


def peak_in_band(spectrum, band, sampling_rate):
    """Return ``(k_max, f_max)`` of the largest ``|Y[k]|`` inside the band.

    Ties resolve to the lowest bin.
    """
    y = np.asarray(spectrum)
    bins = band_bins(y.size, band, sampling_rate)
    k = int(bins[np.argmax(np.abs(y[bins]))])
    return k, k * sampling_rate / y.size
