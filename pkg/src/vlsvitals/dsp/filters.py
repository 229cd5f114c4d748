"""Direct-form IIR filtering, frequency response and band-pass design."""
from __future__ import annotations

import math
from dataclasses import dataclass
from operator import mul

import numpy as np
from scipy import signal as sps

from ..errors import DomainError, UnstableFilterError, ValidationError

# Pole modulus at or above this is treated as unstable.
STABILITY_LIMIT = 1.0 - 1e-9

PAPER_HEART_B = (0.0010, -0.0077, 0.0262, -0.0517, 0.0642, -0.0517, 0.0262, -0.0077, 0.0010)
PAPER_HEART_A = (1.0000, -7.8359, 26.8895, -52.7799, 64.8128, -50.9871, 25.0939, -7.0643, 0.8709)
PAPER_BREATHING_B = (0.0007, 0.0, -0.0013, 0.0, 0.0007)
PAPER_BREATHING_A = (1.0000, -3.9247, 5.7781, -3.7820, 0.9286)


@dataclass(frozen=True)
class StabilityVerdict:
    max_pole_modulus: float
    verdict: str

    @property
    def margin(self):
        return 1.0 - self.max_pole_modulus

    def __str__(self):
        return f"{self.verdict} (max pole modulus {self.max_pole_modulus:.12f}, margin {self.margin:.3e})"


def _verdict(max_modulus):
    if max_modulus < STABILITY_LIMIT:
        return StabilityVerdict(max_modulus, "stable")
    if max_modulus <= 1.0 + 1e-9:
        return StabilityVerdict(max_modulus, "marginal")
    return StabilityVerdict(max_modulus, "unstable")


@dataclass(frozen=True)
class FilterCoefficients:
    """One IIR stage ``x[m] = sum b_i z[m-i] - sum_{j>=1} a_j x[m-j]``.

    Construction rejects stages with a pole modulus of ``1 - 1e-9`` or more
    unless ``allow_unstable`` is set.
    """

    feedforward: tuple
    feedback: tuple
    label: str = "custom"
    allow_unstable: bool = False

    def __post_init__(self):
        b = tuple(float(v) for v in self.feedforward)
        a = tuple(float(v) for v in self.feedback)
        if not b or not a:
            raise ValidationError("coefficient vectors must be non-empty")
        if not all(math.isfinite(v) for v in b + a):
            raise ValidationError("coefficients must be finite")
        if a[0] != 1.0:
            raise ValidationError(f"feedback must be normalized with a[0] == 1, got {a[0]!r}")
        object.__setattr__(self, "feedforward", b)
        object.__setattr__(self, "feedback", a)
        if not self.allow_unstable:
            verdict = self.stability()
            if verdict.verdict != "stable":
                raise UnstableFilterError(f"{self.label} filter is {verdict}")

    def poles(self):
        trimmed = np.trim_zeros(np.array(self.feedback), "b")
        return np.roots(trimmed) if trimmed.size > 1 else np.array([], dtype=complex)

    def stability(self):
        poles = self.poles()
        return _verdict(float(np.max(np.abs(poles))) if poles.size else 0.0)

    @property
    def stages(self):
        return (self,)


@dataclass(frozen=True)
class FilterChain:
    """Cascade of IIR stages applied in order."""

    stages: tuple
    label: str = "chain"

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages or not all(isinstance(s, FilterCoefficients) for s in stages):
            raise ValidationError("a filter chain needs at least one FilterCoefficients stage")
        object.__setattr__(self, "stages", stages)

    def stability(self):
        return _verdict(max(s.stability().max_pole_modulus for s in self.stages))


def iir_filter(coeffs, signal):
    """Run the direct-form recurrence over ``signal`` from zero initial state."""
    z = np.asarray(signal, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise ValidationError("signal must be a non-empty 1-D sequence")
    b_rev = coeffs.feedforward[::-1]
    a_rev = coeffs.feedback[1:][::-1]
    p = len(b_rev) - 1
    q = len(a_rev)
    # Zero padding stands in for the zero initial conditions.
    z_hist = [0.0] * p + z.tolist()
    x_hist = [0.0] * q
    append = x_hist.append
    for m in range(z.size):
        append(sum(map(mul, b_rev, z_hist[m:m + p + 1])) - sum(map(mul, a_rev, x_hist[m:m + q])))
    return np.array(x_hist[q:])


def apply_filter(filt, signal):
    """Apply a :class:`FilterCoefficients` stage or a :class:`FilterChain`."""
    out = signal
    for stage in filt.stages:
        out = iir_filter(stage, out)
    return np.asarray(out, dtype=float)


def frequency_response(coeffs, freq, sampling_rate):
    """Complex gain ``H(e^{jw})`` at ``freq`` hertz.

    Works for single stages and chains; ``freq`` may be an array.
    """
    f = np.asarray(freq, dtype=float)
    if np.any(f < 0) or np.any(f > sampling_rate / 2):
        raise DomainError("frequency must lie in [0, sampling_rate/2]")
    w = 2 * np.pi * f / sampling_rate
    h = np.ones(f.shape, dtype=complex)
    for stage in coeffs.stages:
        zinv = np.exp(-1j * w)
        # polyval wants highest power first; powers here are of z^-1.
        num = np.polyval(stage.feedforward[::-1], zinv)
        den = np.polyval(stage.feedback[::-1], zinv)
        # A pole on the unit circle legitimately yields an infinite gain.
        with np.errstate(divide="ignore", invalid="ignore"):
            h = h * num / den
    return complex(h) if f.ndim == 0 else h


def identity_filter():
    return FilterChain((FilterCoefficients((1.0,), (1.0,), label="identity"),), label="identity")


def paper_heart_filter(allow_unstable=False):
    """Published heart-band coefficients, verbatim (4-decimal rounding included)."""
    stage = FilterCoefficients(PAPER_HEART_B, PAPER_HEART_A, label="paper-heart", allow_unstable=allow_unstable)
    return FilterChain((stage,), label="paper-heart")


def paper_breathing_filter(allow_unstable=False):
    """Published breathing-band coefficients, verbatim.

    The feedback coefficients sum to zero, so z = 1 is a pole.
    """
    stage = FilterCoefficients(
        PAPER_BREATHING_B, PAPER_BREATHING_A, label="paper-breathing", allow_unstable=allow_unstable
    )
    return FilterChain((stage,), label="paper-breathing")


def design_bandpass(band, sampling_rate, order=4, stopband_db=40.0, stopband_ratio=1.9):
    """Chebyshev type-II band-pass as a cascade of second-order stages.

    The stopband edges sit at ``low / stopband_ratio`` and
    ``high * stopband_ratio`` so the whole ``[low, high]`` band is passed
    with modest droop. A single high-order polynomial is avoided because
    its coefficients lose the pole locations at these low normalized
    frequencies.
    """
    if order < 1 or int(order) != order:
        raise ValidationError("design order must be a positive integer")
    if not stopband_db > 0:
        raise ValidationError("stopband attenuation must be positive")
    if not stopband_ratio > 1:
        raise ValidationError("stopband ratio must exceed 1")
    lo = band.low_hz / stopband_ratio
    hi = band.high_hz * stopband_ratio
    if hi >= sampling_rate / 2:
        raise ValidationError(
            f"upper stopband edge {hi:g} Hz reaches Nyquist for sampling rate {sampling_rate:g} Hz"
        )
    sos = sps.cheby2(int(order), stopband_db, [lo, hi], btype="bandpass", fs=sampling_rate, output="sos")
    label = f"designed-{band.kind.value}"
    stages = tuple(FilterCoefficients(tuple(row[:3]), tuple(row[3:]), label=label) for row in sos)
    return FilterChain(stages, label=label)
