"""Sampled received-power traces and their text serialization.

File layout (UTF-8, ``\\n`` line endings)::

    # format_version=1
    # fs=100.0
    # unit=W
    # truth_breathing_bpm=15.0
    # truth_heart_bpm=72.0
    # <free metadata key>=<value>
    1.4826739036470787e-10
    ...

Samples are written with ``repr`` so every float round-trips exactly.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import TraceFormatError, TraceIOError, ValidationError

FORMAT_VERSION = 1
_RESERVED = ("format_version", "fs", "unit", "truth_breathing_bpm", "truth_heart_bpm")
_KEY = re.compile(r"^[A-Za-z0-9_.\-]+$")


@dataclass(frozen=True, eq=False)
class Trace:
    """Uniformly sampled received power with its acquisition metadata.

    ``truth`` is the ground-truth ``(breathing_bpm, heart_bpm)`` pair when
    known, e.g. from the simulator.
    """

    sampling_rate: float
    samples: np.ndarray
    unit: str = "W"
    metadata: dict = field(default_factory=dict)
    truth: tuple | None = None

    def __post_init__(self):
        fs = float(self.sampling_rate)
        if not (math.isfinite(fs) and fs > 0):
            raise ValidationError(f"sampling rate must be positive, got {self.sampling_rate!r}")
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValidationError("trace samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise ValidationError("trace samples must all be finite")
        samples.flags.writeable = False
        if not self.unit or "\n" in self.unit:
            raise ValidationError("unit must be a non-empty single-line string")
        metadata = {str(k): str(v) for k, v in self.metadata.items()}
        for key, value in metadata.items():
            if key in _RESERVED or not _KEY.match(key):
                raise ValidationError(f"invalid metadata key {key!r}")
            if "\n" in value or "\r" in value:
                raise ValidationError(f"metadata value for {key!r} spans lines")
        truth = self.truth
        if truth is not None:
            truth = tuple(float(v) for v in truth)
            if len(truth) != 2 or not all(math.isfinite(v) and v > 0 for v in truth):
                raise ValidationError("truth must be a (breathing_bpm, heart_bpm) pair of positive rates")
        object.__setattr__(self, "sampling_rate", fs)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "metadata", metadata)
        object.__setattr__(self, "truth", truth)

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return (
            self.sampling_rate == other.sampling_rate
            and self.unit == other.unit
            and self.metadata == other.metadata
            and self.truth == other.truth
            and np.array_equal(self.samples, other.samples)
        )

    def __len__(self):
        return self.samples.size

    @property
    def duration(self):
        return self.samples.size / self.sampling_rate

    def times(self):
        return np.arange(self.samples.size) / self.sampling_rate


def write_trace(trace, destination):
    """Write ``trace`` to ``destination`` in the line-oriented text format."""
    lines = [
        f"# format_version={FORMAT_VERSION}",
        f"# fs={trace.sampling_rate!r}",
        f"# unit={trace.unit}",
    ]
    if trace.truth is not None:
        lines.append(f"# truth_breathing_bpm={trace.truth[0]!r}")
        lines.append(f"# truth_heart_bpm={trace.truth[1]!r}")
    lines.extend(f"# {key}={value}" for key, value in trace.metadata.items())
    lines.extend(repr(v) for v in trace.samples.tolist())
    text = "\n".join(lines) + "\n"
    path = Path(destination)
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise TraceIOError(exc.errno, f"cannot write trace: {exc.strerror}", str(path)) from exc


def _parse_float(text, what, line):
    try:
        value = float(text)
    except ValueError:
        raise TraceFormatError(f"{what} is not a number: {text!r}", line) from None
    if not math.isfinite(value):
        raise TraceFormatError(f"{what} is not finite: {text!r}", line)
    return value


def read_trace(source):
    """Parse a trace file written by :func:`write_trace`.

    Unknown header keys are kept in ``metadata``.
    """
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceIOError(exc.errno, f"cannot read trace: {exc.strerror}", str(path)) from exc

    header = {}
    samples = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if samples:
                raise TraceFormatError("header line after sample data", lineno)
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            key = key.strip()
            if not sep or not key:
                raise TraceFormatError(f"malformed header line {raw!r}; expected '# key=value'", lineno)
            if key in header:
                raise TraceFormatError(f"duplicate header key {key!r}", lineno)
            header[key] = (value.strip(), lineno)
            continue
        samples.append(_parse_float(line, "sample", lineno))

    version, vline = header.pop("format_version", (str(FORMAT_VERSION), None))
    if version != str(FORMAT_VERSION):
        raise TraceFormatError(f"unsupported format_version {version!r}", vline)
    if "fs" not in header:
        raise TraceFormatError("missing required header key 'fs'")
    fs_text, fs_line = header.pop("fs")
    fs = _parse_float(fs_text, "fs", fs_line)
    if fs <= 0:
        raise TraceFormatError(f"fs must be positive, got {fs_text!r}", fs_line)
    unit = header.pop("unit", ("W", None))[0]

    truth_keys = [k for k in ("truth_breathing_bpm", "truth_heart_bpm") if k in header]
    truth = None
    if len(truth_keys) == 1:
        missing = {"truth_breathing_bpm", "truth_heart_bpm"} - set(truth_keys)
        raise TraceFormatError(f"incomplete ground truth; missing {missing.pop()!r}", header[truth_keys[0]][1])
    if truth_keys:
        truth = tuple(
            _parse_float(header[k][0], k, header[k][1]) for k in ("truth_breathing_bpm", "truth_heart_bpm")
        )
        del header["truth_breathing_bpm"], header["truth_heart_bpm"]

    if not samples:
        raise TraceFormatError("trace contains no samples")
    metadata = {key: value for key, (value, _) in header.items()}
    try:
        return Trace(fs, np.array(samples), unit=unit, metadata=metadata, truth=truth)
    except ValidationError as exc:
        raise TraceFormatError(str(exc)) from exc
