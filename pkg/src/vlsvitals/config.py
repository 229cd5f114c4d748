"""INI-style run configuration.

Every key is materialized on load so a saved file is fully explicit, and
``save_config(load_config(p))`` reproduces the same configuration. Rates
are written in BPM and angles in degrees; the accessor methods convert to
the SI units used by the models.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .dsp import (
    BandSpec,
    PipelineConfig,
    design_bandpass,
    identity_filter,
    paper_breathing_filter,
    paper_heart_filter,
)
from .errors import ConfigError, TraceIOError, ValidationError
from .metrics import VitalKind
from .optics import LambertianChannel
from .physio import AdcModel, NoiseModel, SubjectMotion

FILTER_MODES = ("designed", "paper", "identity")
SWEEP_PARAMETERS = ("distance", "window_size", "snr", "position")


def _opt(fmt):
    return lambda v: "" if v is None else fmt(v)


def _parse_opt(parse):
    return lambda s: None if s == "" else parse(s)


def _parse_bool(s):
    lowered = s.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_int(s):
    value = float(s)
    if not value.is_integer():
        raise ValueError(f"not an integer: {s!r}")
    return int(value)


def _parse_floats(s):
    return tuple(float(p) for p in s.split(",") if p.strip()) if s else ()


def _parse_records(width):
    def parse(s):
        records = []
        for chunk in s.split(";"):
            if not chunk.strip():
                continue
            parts = tuple(float(p) for p in chunk.split(":"))
            if len(parts) != width:
                raise ValueError(f"expected {width} ':'-separated numbers, got {chunk.strip()!r}")
            records.append(parts)
        return tuple(records)
    return parse


def _fmt_records(records):
    return "; ".join(":".join(repr(float(v)) for v in rec) for rec in records)


def _parse_grid(s):
    lo, hi, count = s.split(":")
    count = _parse_int(count)
    if count < 1:
        raise ValueError("grid count must be >= 1")
    return (float(lo), float(hi), count)


CODECS = {
    "float": (repr, float),
    "int": (str, _parse_int),
    "bool": (lambda v: "true" if v else "false", _parse_bool),
    "str": (str, str),
    "opt_float": (_opt(repr), _parse_opt(float)),
    "opt_int": (_opt(str), _parse_opt(_parse_int)),
    "floats": (lambda v: ", ".join(repr(float(x)) for x in v), _parse_floats),
    "schedule": (_fmt_records, _parse_records(3)),
    "tones": (_fmt_records, _parse_records(2)),
    "grid": (_opt(lambda g: f"{g[0]!r}:{g[1]!r}:{g[2]}"), _parse_opt(_parse_grid)),
}


def _f(default, codec):
    return field(default=default, metadata={"codec": codec})


@dataclass(frozen=True)
class PipelineSection:
    window_size: int = _f(2048, "int")
    window_overlap: float = _f(0.0, "float")
    breathing_low_bpm: float = _f(10.0, "float")
    breathing_high_bpm: float = _f(60.0, "float")
    heart_low_bpm: float = _f(30.0, "float")
    heart_high_bpm: float = _f(200.0, "float")
    filter: str = _f("designed", "str")
    design_order: int = _f(4, "int")
    stopband_db: float = _f(40.0, "float")
    stopband_ratio: float = _f(1.9, "float")
    allow_unstable: bool = _f(False, "bool")
    confidence_threshold: float = _f(10.0, "float")
    warmup_s: float = _f(0.0, "float")
    remove_mean: bool = _f(True, "bool")


@dataclass(frozen=True)
class SubjectSection:
    rest_distance_m: float = _f(0.4, "float")
    breathing_amplitude_m: float = _f(0.005, "float")
    breathing_bpm: float = _f(15.0, "float")
    breathing_phase_rad: float = _f(0.0, "float")
    heartbeat_amplitude_m: float = _f(0.0005, "float")
    heart_bpm: float = _f(72.0, "float")
    heartbeat_phase_rad: float = _f(0.0, "float")
    heartbeat_harmonics: tuple = _f((), "floats")
    # (time_s, breathing_bpm, heart_bpm) knots.
    rate_schedule: tuple = _f((), "schedule")


@dataclass(frozen=True)
class ChannelSection:
    half_power_semi_angle_deg: float = _f(60.0, "float")
    path_loss_exponent: float = _f(3.238, "float")
    system_constant_db: float = _f(-111.2, "float")
    detector_area_m2: float = _f(1e-4, "float")
    transmit_power_w: float | None = _f(None, "opt_float")


@dataclass(frozen=True)
class NoiseSection:
    noise_std_w: float = _f(0.0, "float")
    snr_db: float | None = _f(None, "opt_float")
    drift_amplitude_w: float = _f(0.0, "float")
    drift_period_s: float = _f(60.0, "float")
    # (frequency_hz, amplitude_w) pairs.
    interference: tuple = _f((), "tones")
    seed: int = _f(0, "int")


@dataclass(frozen=True)
class AdcSection:
    sampling_rate: float = _f(100.0, "float")
    bit_depth: int | None = _f(None, "opt_int")
    full_scale_w: float | None = _f(None, "opt_float")


@dataclass(frozen=True)
class SimulationSection:
    duration_s: float = _f(60.0, "float")
    position_x_m: float | None = _f(None, "opt_float")
    position_y_m: float | None = _f(None, "opt_float")


@dataclass(frozen=True)
class SweepSection:
    parameter: str = _f("distance", "str")
    values: tuple = _f((0.3, 0.4, 0.6, 0.9, 1.2), "floats")
    trials: int = _f(10, "int")
    seed_base: int = _f(0, "int")
    # (min, max, count) for the position grid.
    grid_x_m: tuple | None = _f((-0.4, 0.4, 9), "grid")
    grid_y_m: tuple | None = _f((0.2, 1.0, 9), "grid")


SECTIONS = {
    "pipeline": PipelineSection,
    "subject": SubjectSection,
    "channel": ChannelSection,
    "noise": NoiseSection,
    "adc": AdcSection,
    "simulation": SimulationSection,
    "sweep": SweepSection,
}


@dataclass(frozen=True)
class RunConfig:
    """Pipeline, simulator and sweep settings for one run."""

    pipeline: PipelineSection = field(default_factory=PipelineSection)
    subject: SubjectSection = field(default_factory=SubjectSection)
    channel: ChannelSection = field(default_factory=ChannelSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    adc: AdcSection = field(default_factory=AdcSection)
    simulation: SimulationSection = field(default_factory=SimulationSection)
    sweep: SweepSection = field(default_factory=SweepSection)

    def update(self, section, **changes):
        """Return a copy with fields of one section replaced."""
        return dataclasses.replace(self, **{section: dataclasses.replace(getattr(self, section), **changes)})

    def channel_model(self):
        c = self.channel
        return LambertianChannel(
            half_power_semi_angle=math.radians(c.half_power_semi_angle_deg),
            path_loss_exponent=c.path_loss_exponent,
            system_constant_db=c.system_constant_db,
            detector_area=c.detector_area_m2,
            transmit_power=c.transmit_power_w,
        )

    def motion(self):
        s = self.subject
        schedule = tuple((t, b / 60.0, h / 60.0) for t, b, h in s.rate_schedule) or None
        return SubjectMotion(
            rest_distance=s.rest_distance_m,
            breathing_amplitude=s.breathing_amplitude_m,
            breathing_rate=s.breathing_bpm / 60.0,
            breathing_phase=s.breathing_phase_rad,
            heartbeat_amplitude=s.heartbeat_amplitude_m,
            heartbeat_rate=s.heart_bpm / 60.0,
            heartbeat_phase=s.heartbeat_phase_rad,
            heartbeat_harmonics=s.heartbeat_harmonics,
            rate_schedule=schedule,
        )

    def noise_model(self, seed=None):
        n = self.noise
        return NoiseModel(
            additive_noise_std=n.noise_std_w,
            snr_db=n.snr_db,
            drift_amplitude=n.drift_amplitude_w,
            drift_period=n.drift_period_s,
            interference_tones=n.interference,
            seed=n.seed if seed is None else seed,
        )

    def adc_model(self):
        a = self.adc
        return AdcModel(sampling_rate=a.sampling_rate, bit_depth=a.bit_depth, full_scale=a.full_scale_w)

    def position(self):
        s = self.simulation
        if (s.position_x_m is None) != (s.position_y_m is None):
            raise ConfigError("position_x_m and position_y_m must be given together")
        return None if s.position_x_m is None else (s.position_x_m, s.position_y_m)

    def bands(self):
        p = self.pipeline
        return (
            BandSpec(p.breathing_low_bpm, p.breathing_high_bpm, VitalKind.BREATHING),
            BandSpec(p.heart_low_bpm, p.heart_high_bpm, VitalKind.HEART),
        )

    def filters(self, allow_unstable=None):
        p = self.pipeline
        unstable_ok = p.allow_unstable if allow_unstable is None else allow_unstable
        if p.filter == "designed":
            fs = self.adc.sampling_rate
            return tuple(
                design_bandpass(b, fs, p.design_order, p.stopband_db, p.stopband_ratio) for b in self.bands()
            )
        if p.filter == "paper":
            return paper_breathing_filter(unstable_ok), paper_heart_filter(unstable_ok)
        if p.filter == "identity":
            return identity_filter(), identity_filter()
        raise ConfigError(f"unknown filter mode {p.filter!r}; expected one of {', '.join(FILTER_MODES)}")

    def pipeline_config(self, allow_unstable=None):
        p = self.pipeline
        breathing_band, heart_band = self.bands()
        breathing_filter, heart_filter = self.filters(allow_unstable)
        return PipelineConfig(
            sampling_rate=self.adc.sampling_rate,
            window_size=p.window_size,
            window_overlap=p.window_overlap,
            breathing_band=breathing_band,
            heart_band=heart_band,
            breathing_filter=breathing_filter,
            heart_filter=heart_filter,
            confidence_threshold=p.confidence_threshold,
            warmup_s=p.warmup_s,
            remove_mean=p.remove_mean,
        )

    def validate(self):
        """Build every model once so inconsistent values fail early."""
        if self.pipeline.filter not in FILTER_MODES:
            raise ConfigError(f"unknown filter mode {self.pipeline.filter!r}")
        if self.sweep.parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"unknown sweep parameter {self.sweep.parameter!r}")
        if self.sweep.trials < 1:
            raise ConfigError("sweep trials must be >= 1")
        if self.sweep.seed_base < 0:
            raise ConfigError("sweep seed_base must be >= 0")
        if not (math.isfinite(self.simulation.duration_s) and self.simulation.duration_s > 0):
            raise ConfigError("duration_s must be positive")
        self.bands()
        self.channel_model()
        self.motion()
        self.noise_model()
        self.adc_model()
        self.position()
        # The published presets may be deliberately unstable; that is checked when used.
        self.pipeline_config(allow_unstable=True)
        return self


def config_to_text(config):
    parser = configparser.ConfigParser(interpolation=None)
    for name in SECTIONS:
        section = getattr(config, name)
        parser[name] = {
            f.name: CODECS[f.metadata["codec"]][0](getattr(section, f.name)) for f in dataclasses.fields(section)
        }
    lines = []
    for name in SECTIONS:
        lines.append(f"[{name}]")
        lines.extend(f"{key} = {value}".rstrip() for key, value in parser[name].items())
        lines.append("")
    return "format_version = 1\n\n" + "\n".join(lines)


def config_from_text(text, strict=True):
    """Parse configuration text; missing keys take their defaults."""
    body = []
    version = None
    in_preamble = True
    for line in text.splitlines():
        stripped = line.strip()
        if in_preamble and stripped.startswith("["):
            in_preamble = False
        if in_preamble and stripped and not stripped.startswith(("#", ";")):
            key, sep, value = stripped.partition("=")
            if sep and key.strip() == "format_version":
                version = value.strip()
                continue
            raise ConfigError(f"unexpected line outside a section: {stripped!r}")
        body.append(line)
    if version not in (None, "1"):
        raise ConfigError(f"unsupported config format_version {version!r}")

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("\n".join(body))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    unknown = [f"[{s}]" for s in parser.sections() if s not in SECTIONS]
    sections = {}
    for name, cls in SECTIONS.items():
        known = {f.name: f for f in dataclasses.fields(cls)}
        values = {}
        if parser.has_section(name):
            for key, raw in parser.items(name):
                if key not in known:
                    unknown.append(f"{name}.{key}")
                    continue
                parse = CODECS[known[key].metadata["codec"]][1]
                try:
                    values[key] = parse(raw.strip())
                except ValueError as exc:
                    raise ConfigError(f"{name}.{key}: {exc}") from None
        sections[name] = cls(**values)
    if unknown and strict:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    config = RunConfig(**sections)
    try:
        return config.validate()
    except ConfigError:
        raise
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None, strict=True):
    """Load a config file; ``None`` gives the all-defaults configuration."""
    if path is None:
        return RunConfig().validate()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceIOError(exc.errno, f"cannot read config: {exc.strerror}", str(path)) from exc
    return config_from_text(text, strict=strict)


def save_config(config, path):
    path = Path(path)
    try:
        path.write_text(config_to_text(config), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise TraceIOError(exc.errno, f"cannot write config: {exc.strerror}", str(path)) from exc
