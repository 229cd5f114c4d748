"""Evaluation protocols: parameter sweeps, Monte-Carlo trials, rate tracking.

Trial ``i`` of every sweep point uses noise seed ``seed_base + i``, so all
points see the same noise realizations and trends are not masked by
sampling noise between points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SWEEP_PARAMETERS, RunConfig
from .dsp import estimate_vitals
from .errors import ValidationError
from .metrics import VitalKind, mean_error_pct, mean_variance
from .optics import position_geometry
from .physio import SubjectMotion, synthesize_trace

SWEEP_COLUMNS = (
    "parameter", "value", "trials",
    "breathing_error_pct", "heart_error_pct",
    "breathing_variance_bpm2", "heart_variance_bpm2",
    "mean_power_w",
)
GRID_COLUMNS = (
    "x_m", "y_m", "distance_m", "angle_deg", "in_fov", "mean_power_w",
    "breathing_error_pct", "heart_error_pct",
)


@dataclass(frozen=True)
class SweepSpec:
    """What to vary, over which values, and how many seeded trials per point."""

    parameter: str
    values: tuple = ()
    trials: int = 10
    seed_base: int = 0
    grid_x: tuple | None = None
    grid_y: tuple | None = None

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValidationError(
                f"unknown sweep parameter {self.parameter!r}; expected one of {', '.join(SWEEP_PARAMETERS)}"
            )
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        object.__setattr__(self, "values", tuple(sorted(float(v) for v in self.values)))
        if self.parameter == "position":
            if self.grid_x is None or self.grid_y is None:
                raise ValidationError("position sweep needs grid_x and grid_y")
        elif not self.values:
            raise ValidationError("sweep needs at least one value")

    @classmethod
    def from_config(cls, run):
        s = run.sweep
        return cls(s.parameter, s.values, s.trials, s.seed_base, s.grid_x_m, s.grid_y_m)


def simulate(run, seed=None, position=None):
    """Synthesize one trace from a :class:`RunConfig`."""
    return synthesize_trace(
        run.motion(),
        run.channel_model(),
        run.adc_model(),
        run.noise_model(seed),
        run.simulation.duration_s,
        position=run.position() if position is None else position,
    )


def _apply_point(run, parameter, value):
    if parameter == "distance":
        return run.update("subject", rest_distance_m=value)
    if parameter == "window_size":
        if not float(value).is_integer():
            raise ValidationError(f"window size must be an integer, got {value!r}")
        return run.update("pipeline", window_size=int(value))
    if parameter == "snr":
        return run.update("noise", snr_db=value, noise_std_w=0.0)
    raise ValidationError(f"parameter {parameter!r} is not a scalar sweep")


def _run_trials(run, trials, seed_base, position=None):
    pipeline = run.pipeline_config()
    reports, powers = [], []
    for i in range(trials):
        trace = simulate(run, seed=seed_base + i, position=position)
        reports.append(estimate_vitals(trace, pipeline))
        powers.append(float(np.mean(trace.samples)))
    return reports, math.fsum(powers) / len(powers)


def run_sweep(spec, run=None):
    """Evaluate every sweep point and return rows ordered by swept value."""
    run = run or RunConfig()
    if spec.parameter == "position":
        return position_grid(spec, run)
    rows = []
    for value in spec.values:
        point = _apply_point(run, spec.parameter, value)
        reports, power = _run_trials(point, spec.trials, spec.seed_base)
        rows.append({
            "parameter": spec.parameter,
            "value": value,
            "trials": spec.trials,
            "breathing_error_pct": mean_error_pct(reports, VitalKind.BREATHING),
            "heart_error_pct": mean_error_pct(reports, VitalKind.HEART),
            "breathing_variance_bpm2": mean_variance(reports, VitalKind.BREATHING),
            "heart_variance_bpm2": mean_variance(reports, VitalKind.HEART),
            "mean_power_w": power,
        })
    return rows


def _grid_axis(grid):
    lo, hi, count = grid
    return np.linspace(lo, hi, int(count)).tolist()


def position_grid(spec, run=None):
    """Received power and errors over an ``(x, y)`` grid in front of the sensor.

    Points behind the sensor or outside the field of view report zero
    power and no errors.
    """
    run = run or RunConfig()
    channel = run.channel_model()
    rows = []
    for y in _grid_axis(spec.grid_y):
        for x in _grid_axis(spec.grid_x):
            row = dict.fromkeys(GRID_COLUMNS)
            row.update(x_m=x, y_m=y, in_fov=False, mean_power_w=0.0)
            if y > 0:
                distance, angle = position_geometry(x, y)
                row.update(distance_m=distance, angle_deg=math.degrees(angle))
                if angle < channel.half_power_semi_angle:
                    reports, power = _run_trials(run, spec.trials, spec.seed_base, position=(x, y))
                    row.update(
                        in_fov=True,
                        mean_power_w=power,
                        breathing_error_pct=mean_error_pct(reports, VitalKind.BREATHING),
                        heart_error_pct=mean_error_pct(reports, VitalKind.HEART),
                    )
            rows.append(row)
    return rows


def draw_motion(rng, base, breathing_bpm=(12.0, 20.0), heart_bpm=(60.0, 100.0)):
    """Copy of ``base`` with uniformly drawn rates and phases."""
    return SubjectMotion(
        rest_distance=base.rest_distance,
        breathing_amplitude=base.breathing_amplitude,
        breathing_rate=rng.uniform(*breathing_bpm) / 60.0,
        breathing_phase=rng.uniform(0.0, 2 * math.pi),
        heartbeat_amplitude=base.heartbeat_amplitude,
        heartbeat_rate=rng.uniform(*heart_bpm) / 60.0,
        heartbeat_phase=rng.uniform(0.0, 2 * math.pi),
        heartbeat_harmonics=base.heartbeat_harmonics,
    )


def monte_carlo(run, trials, seed_base=0, breathing_bpm=(12.0, 20.0), heart_bpm=(60.0, 100.0)):
    """Reports for ``trials`` subjects with random rates; seed ``seed_base + i`` drives trial ``i``."""
    pipeline = run.pipeline_config()
    base = run.motion()
    reports = []
    for i in range(trials):
        seed = seed_base + i
        motion = draw_motion(np.random.default_rng(seed), base, breathing_bpm, heart_bpm)
        trace = synthesize_trace(
            motion, run.channel_model(), run.adc_model(), run.noise_model(seed), run.simulation.duration_s
        )
        reports.append(estimate_vitals(trace, pipeline))
    return reports


@dataclass(frozen=True)
class TrackPoint:
    window: int
    kind: VitalKind
    center_s: float
    bpm: float
    scheduled_bpm: float
    confident: bool


def track_rates(report, motion, sampling_rate, window_size):
    """Pair each window estimate with the scheduled rate at the window centre."""
    points = []
    for w in report.windows:
        center = (w.start + window_size / 2) / sampling_rate
        breathing_hz, heart_hz = motion.instantaneous_rates(center)
        scheduled = breathing_hz if w.kind is VitalKind.BREATHING else heart_hz
        points.append(TrackPoint(w.index, w.kind, center, w.bpm, 60.0 * float(scheduled), w.confident))
    return points


def tracking_hit_rate(points, tolerance_bpm, kind=None):
    selected = [p for p in points if kind is None or p.kind is VitalKind(kind)]
    if not selected:
        raise ValidationError("no tracking points")
    hits = sum(p.confident and abs(p.bpm - p.scheduled_bpm) <= tolerance_bpm for p in selected)
    return hits / len(selected)


def recovery_config(run=None):
    """Post-exercise scenario: 15 minutes, rates relaxing linearly, bands retuned.

    The heart band's lower edge is raised above the initial 30 BPM
    breathing rate so the breathing fundamental cannot win the heart search.
    """
    run = run or RunConfig()
    run = run.update("subject", rate_schedule=((0.0, 30.0, 120.0), (900.0, 12.0, 70.0)))
    run = run.update("simulation", duration_s=900.0)
    return run.update(
        "pipeline",
        window_overlap=0.5,
        breathing_low_bpm=8.0,
        breathing_high_bpm=45.0,
        heart_low_bpm=45.0,
        heart_high_bpm=180.0,
    )
