"""Synthetic subject, noise and ADC models.

A breathing subject modulates the reflector distance; the optical channel
turns that into received power, to which receiver noise is added before
optional quantization.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .optics import (
    LambertianChannel,
    position_geometry,
    received_power_from_distance,
    received_power_geometric,
)
from .trace import Trace

BREATHING_PEAK_TO_PEAK_RANGE = (0.005, 0.02)
HEARTBEAT_PEAK_TO_PEAK_MAX = 0.002
# Highest band edge of interest (200 BPM) in hertz.
HIGHEST_BAND_EDGE_HZ = 200.0 / 60.0


class PlausibilityWarning(UserWarning):
    """Chest excursion outside the range usually observed on adults."""


def _rate_schedule(schedule):
    knots = tuple(tuple(float(v) for v in knot) for knot in schedule)
    if not knots:
        raise ValidationError("rate schedule needs at least one knot")
    for knot in knots:
        if len(knot) != 3:
            raise ValidationError("rate schedule knots are (time, breathing_rate, heartbeat_rate)")
        t, fb, fh = knot
        if not (math.isfinite(t) and t >= 0):
            raise ValidationError(f"schedule time must be >= 0, got {t!r}")
        if not (fb > 0 and fh > 0 and math.isfinite(fb) and math.isfinite(fh)):
            raise ValidationError("scheduled rates must be positive")
    times = [k[0] for k in knots]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValidationError("rate schedule times must be strictly increasing")
    return knots


@dataclass(frozen=True)
class SubjectMotion:
    """Chest kinematics of the subject.

    Amplitudes are half peak-to-peak excursions in meters and rates are in
    hertz. ``heartbeat_harmonics`` gives relative amplitudes of the 2nd,
    3rd, ... harmonics of the heartbeat; empty means a pure sinusoid.
    ``rate_schedule`` is a sequence of ``(time_s, breathing_hz, heart_hz)``
    knots interpolated linearly and held constant outside the knot range;
    when present it replaces ``breathing_rate`` and ``heartbeat_rate``.
    """

    rest_distance: float = 0.4
    breathing_amplitude: float = 0.005
    breathing_rate: float = 0.25
    breathing_phase: float = 0.0
    heartbeat_amplitude: float = 0.0005
    heartbeat_rate: float = 1.2
    heartbeat_phase: float = 0.0
    heartbeat_harmonics: tuple = ()
    rate_schedule: tuple | None = None

    def __post_init__(self):
        values = (
            self.rest_distance, self.breathing_amplitude, self.breathing_rate, self.breathing_phase,
            self.heartbeat_amplitude, self.heartbeat_rate, self.heartbeat_phase,
        )
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("subject motion parameters must be finite")
        if self.breathing_amplitude < 0 or self.heartbeat_amplitude < 0:
            raise ValidationError("amplitudes must be non-negative")
        if self.breathing_rate <= 0 or self.heartbeat_rate <= 0:
            raise ValidationError("rates must be positive")
        harmonics = tuple(float(h) for h in self.heartbeat_harmonics)
        if not all(math.isfinite(h) and h >= 0 for h in harmonics):
            raise ValidationError("harmonic amplitudes must be finite and non-negative")
        object.__setattr__(self, "heartbeat_harmonics", harmonics)
        if self.rate_schedule is not None:
            object.__setattr__(self, "rate_schedule", _rate_schedule(self.rate_schedule))
        if self.rest_distance <= self.max_excursion:
            raise ValidationError(
                f"rest distance {self.rest_distance!r} m must exceed the total chest excursion "
                f"{self.max_excursion!r} m"
            )
        lo, hi = BREATHING_PEAK_TO_PEAK_RANGE
        if self.breathing_amplitude > 0 and not lo <= 2 * self.breathing_amplitude <= hi:
            warnings.warn(
                f"breathing peak-to-peak {2 * self.breathing_amplitude:g} m outside [{lo}, {hi}] m",
                PlausibilityWarning, stacklevel=3,
            )
        if 2 * self.heartbeat_amplitude > HEARTBEAT_PEAK_TO_PEAK_MAX:
            warnings.warn(
                f"heartbeat peak-to-peak {2 * self.heartbeat_amplitude:g} m exceeds "
                f"{HEARTBEAT_PEAK_TO_PEAK_MAX} m",
                PlausibilityWarning, stacklevel=3,
            )

    @property
    def max_excursion(self):
        return self.breathing_amplitude + self.heartbeat_amplitude * (1.0 + sum(self.heartbeat_harmonics))

    def instantaneous_rates(self, t):
        """Breathing and heartbeat rates in hertz at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        if self.rate_schedule is None:
            return np.full(t.shape, self.breathing_rate), np.full(t.shape, self.heartbeat_rate)
        knots = np.array(self.rate_schedule)
        return np.interp(t, knots[:, 0], knots[:, 1]), np.interp(t, knots[:, 0], knots[:, 2])

    def phases(self, t):
        """Breathing and heartbeat phases in radians at time(s) ``t``."""
        t = np.asarray(t, dtype=float)
        if self.rate_schedule is None:
            return (
                2 * np.pi * self.breathing_rate * t + self.breathing_phase,
                2 * np.pi * self.heartbeat_rate * t + self.heartbeat_phase,
            )
        knots = np.array(self.rate_schedule)
        cycles_b = _integrate_piecewise_linear(knots[:, 0], knots[:, 1], t)
        cycles_h = _integrate_piecewise_linear(knots[:, 0], knots[:, 2], t)
        return 2 * np.pi * cycles_b + self.breathing_phase, 2 * np.pi * cycles_h + self.heartbeat_phase

    def mean_rates(self, duration):
        """Time-averaged breathing and heartbeat rates in hertz over ``[0, duration]``."""
        if self.rate_schedule is None:
            return self.breathing_rate, self.heartbeat_rate
        knots = np.array(self.rate_schedule)
        end = np.array([duration])
        return (
            float(_integrate_piecewise_linear(knots[:, 0], knots[:, 1], end)[0]) / duration,
            float(_integrate_piecewise_linear(knots[:, 0], knots[:, 2], end)[0]) / duration,
        )


def _integrate_piecewise_linear(knot_t, knot_f, t):
    """Integral from 0 to ``t`` of the linearly interpolated, end-clamped rate."""
    # Prepend a knot at t=0 so the constant lead-in is covered.
    if knot_t[0] > 0:
        knot_t = np.concatenate(([0.0], knot_t))
        knot_f = np.concatenate(([knot_f[0]], knot_f))
    seg_area = 0.5 * (knot_f[1:] + knot_f[:-1]) * np.diff(knot_t)
    cum = np.concatenate(([0.0], np.cumsum(seg_area)))
    idx = np.clip(np.searchsorted(knot_t, t, side="right") - 1, 0, len(knot_t) - 1)
    dt = t - knot_t[idx]
    slope = np.zeros_like(knot_f)
    slope[:-1] = np.diff(knot_f) / np.diff(knot_t)
    return cum[idx] + knot_f[idx] * dt + 0.5 * slope[idx] * dt * dt


def chest_displacement(motion, t):
    """Reflector distance ``d(t)`` in meters.

    Inhale (positive sine) moves the chest toward the sensor, so distance
    drops and received power rises.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValidationError("time must be non-negative")
    phase_b, phase_h = motion.phases(t_arr)
    heart = np.sin(phase_h)
    for order, rel in enumerate(motion.heartbeat_harmonics, start=2):
        heart = heart + rel * np.sin(order * phase_h)
    d = motion.rest_distance - motion.breathing_amplitude * np.sin(phase_b) - motion.heartbeat_amplitude * heart
    return float(d) if t_arr.ndim == 0 else d


@dataclass(frozen=True)
class NoiseModel:
    """Receiver-side disturbances added in the power domain.

    ``snr_db``, when set, fixes the white-noise level relative to the
    variance of the noiseless trace and must not be combined with
    ``additive_noise_std``.
    """

    additive_noise_std: float = 0.0
    snr_db: float | None = None
    drift_amplitude: float = 0.0
    drift_period: float = 60.0
    interference_tones: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.additive_noise_std) and self.additive_noise_std >= 0):
            raise ValidationError("additive noise std must be >= 0")
        if self.snr_db is not None:
            if not math.isfinite(self.snr_db):
                raise ValidationError("snr_db must be finite")
            if self.additive_noise_std > 0:
                raise ValidationError("give either additive_noise_std or snr_db, not both")
        if not (math.isfinite(self.drift_amplitude) and self.drift_amplitude >= 0):
            raise ValidationError("drift amplitude must be >= 0")
        if not (math.isfinite(self.drift_period) and self.drift_period > 0):
            raise ValidationError("drift period must be positive")
        tones = tuple((float(f), float(a)) for f, a in self.interference_tones)
        if not all(f > 0 and a >= 0 and math.isfinite(f) and math.isfinite(a) for f, a in tones):
            raise ValidationError("interference tones need positive frequency and non-negative amplitude")
        object.__setattr__(self, "interference_tones", tones)
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class AdcModel:
    """Sampling and optional uniform quantization over ``[0, full_scale]``."""

    sampling_rate: float = 100.0
    bit_depth: int | None = None
    full_scale: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.sampling_rate) and self.sampling_rate > 2 * HIGHEST_BAND_EDGE_HZ):
            raise ValidationError(
                f"sampling rate must exceed {2 * HIGHEST_BAND_EDGE_HZ:.4f} Hz, got {self.sampling_rate!r}"
            )
        if self.bit_depth is not None:
            if int(self.bit_depth) != self.bit_depth or not 1 <= self.bit_depth <= 32:
                raise ValidationError("bit depth must be an integer in [1, 32]")
            if self.full_scale is None or not (math.isfinite(self.full_scale) and self.full_scale > 0):
                raise ValidationError("quantization needs a positive full_scale")

    def quantize(self, power):
        if self.bit_depth is None:
            return power
        levels = 2 ** int(self.bit_depth)
        lsb = self.full_scale / levels
        return np.clip(np.round(power / lsb), 0, levels - 1) * lsb


def sample_count(sampling_rate, duration):
    # Guards floor() against products such as 99.99999999999999.
    return int(math.floor(sampling_rate * duration * (1 + 1e-12)))


def _fmt(value):
    return repr(float(value))


def synthesize_trace(
    motion=None,
    channel=None,
    adc=None,
    noise=None,
    duration=60.0,
    position=None,
):
    """Simulate the received-power trace seen by the photodetector.

    Parameters
    ----------
    motion, channel, adc, noise
        Model components; ``None`` selects the defaults (15 BPM breathing,
        72 BPM heartbeat at 40 cm, 100 Hz, noiseless).
    duration : float
        Length in seconds; the trace has ``floor(fs * duration)`` samples.
    position : tuple of float, optional
        ``(x, y)`` rest position of the chest in meters. When given, the
        geometric link equation is used with the angle implied by the
        position and the rest distance of ``motion`` is replaced by the
        distance to that position.

    Returns
    -------
    Trace
        Samples in watts, with generator parameters in ``metadata`` and the
        time-averaged true rates in ``truth``.
    """
    motion = motion or SubjectMotion()
    channel = channel or LambertianChannel()
    adc = adc or AdcModel()
    noise = noise or NoiseModel()
    if not (math.isfinite(duration) and duration > 0):
        raise ValidationError(f"duration must be positive, got {duration!r}")
    n = sample_count(adc.sampling_rate, duration)
    if n < 1:
        raise ValidationError("duration is shorter than one sample period")

    t = np.arange(n) / adc.sampling_rate
    distance = chest_displacement(motion, t)
    if position is None:
        clean = received_power_from_distance(channel, distance)
    else:
        rest, angle = position_geometry(*position)
        if rest <= motion.max_excursion:
            raise ValidationError("position is closer than the chest excursion")
        clean = received_power_geometric(channel, rest + (distance - motion.rest_distance), angle, angle)

    rng = np.random.default_rng(noise.seed)
    std = noise.additive_noise_std
    if noise.snr_db is not None:
        std = math.sqrt(float(np.var(clean)) / 10.0 ** (noise.snr_db / 10.0))
    power = clean + std * rng.standard_normal(n)
    if noise.drift_amplitude > 0:
        power = power + noise.drift_amplitude * np.sin(2 * np.pi * t / noise.drift_period)
    for freq, amp in noise.interference_tones:
        power = power + amp * np.sin(2 * np.pi * freq * t)
    power = adc.quantize(power)

    mean_b, mean_h = motion.mean_rates(n / adc.sampling_rate)
    metadata = {
        "generator": "vlsvitals.synthesize_trace",
        "duration_s": _fmt(duration),
        "rest_distance_m": _fmt(motion.rest_distance),
        "breathing_amplitude_m": _fmt(motion.breathing_amplitude),
        "breathing_rate_hz": _fmt(motion.breathing_rate),
        "breathing_phase_rad": _fmt(motion.breathing_phase),
        "heartbeat_amplitude_m": _fmt(motion.heartbeat_amplitude),
        "heartbeat_rate_hz": _fmt(motion.heartbeat_rate),
        "heartbeat_phase_rad": _fmt(motion.heartbeat_phase),
        "heartbeat_harmonics": ",".join(_fmt(h) for h in motion.heartbeat_harmonics),
        "rate_schedule": ";".join(":".join(_fmt(v) for v in k) for k in motion.rate_schedule or ()),
        "half_power_semi_angle_rad": _fmt(channel.half_power_semi_angle),
        "path_loss_exponent": _fmt(channel.path_loss_exponent),
        "system_constant_db": _fmt(channel.system_constant_db),
        "noise_std_w": _fmt(std),
        "snr_db": "" if noise.snr_db is None else _fmt(noise.snr_db),
        "drift_amplitude_w": _fmt(noise.drift_amplitude),
        "drift_period_s": _fmt(noise.drift_period),
        "interference": ";".join(f"{_fmt(f)}:{_fmt(a)}" for f, a in noise.interference_tones),
        "seed": str(noise.seed),
        "bit_depth": "" if adc.bit_depth is None else str(adc.bit_depth),
        "position_m": "" if position is None else f"{_fmt(position[0])},{_fmt(position[1])}",
    }
    return Trace(
        adc.sampling_rate,
        power,
        unit="W",
        metadata=metadata,
        truth=(60.0 * mean_b, 60.0 * mean_h),
    )
