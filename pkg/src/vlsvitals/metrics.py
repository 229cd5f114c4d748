"""Estimate reports and the evaluation arithmetic applied to them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import DomainError, ValidationError


class VitalKind(str, Enum):
    BREATHING = "breathing"
    HEART = "heart"


@dataclass(frozen=True)
class WindowEstimate:
    """Rate found in one analysis window for one vital sign."""

    index: int
    kind: VitalKind
    start: int
    bpm: float
    peak_bin: int
    # Peak magnitude over the median in-band magnitude.
    peak_ratio: float
    confident: bool


@dataclass(frozen=True)
class VitalsReport:
    """Per-window estimates plus aggregates for one trace.

    Aggregates are computed over confident windows only. A kind with no
    confident window has ``None`` as mean and variance.
    """

    windows: tuple
    resolution_bpm: float
    reference_bpm: dict = field(default_factory=dict)

    def per_window(self, kind, confident_only=False):
        kind = VitalKind(kind)
        return [w for w in self.windows if w.kind is kind and (w.confident or not confident_only)]

    def _values(self, kind):
        return np.array([w.bpm for w in self.per_window(kind, confident_only=True)])

    @property
    def per_window_bpm(self):
        return [(w.index, w.kind, w.bpm, w.confident) for w in self.windows]

    @property
    def mean_bpm(self):
        out = {}
        for kind in VitalKind:
            values = self._values(kind)
            out[kind] = float(math.fsum(values) / values.size) if values.size else None
        return out

    @property
    def variance_bpm(self):
        # Population variance over the fixed measurement.
        out = {}
        for kind in VitalKind:
            values = self._values(kind)
            out[kind] = float(np.var(values)) if values.size else None
        return out

    @property
    def error_pct(self):
        means = self.mean_bpm
        return {
            kind: absolute_error_pct(means[kind], ref)
            for kind, ref in self.reference_bpm.items()
            if means[kind] is not None
        }

    def with_reference(self, breathing_bpm, heart_bpm):
        return replace(
            self,
            reference_bpm={VitalKind.BREATHING: float(breathing_bpm), VitalKind.HEART: float(heart_bpm)},
        )


def absolute_error_pct(estimate, reference):
    """``100 * |estimate - reference| / reference``."""
    if not reference > 0:
        raise DomainError(f"reference rate must be positive, got {reference!r}")
    return 100.0 * abs(estimate - reference) / reference


def _require_references(trials):
    if not trials:
        raise ValidationError("no trials given")
    for i, report in enumerate(trials):
        missing = [k.value for k in VitalKind if k not in report.reference_bpm]
        if missing:
            raise ValidationError(f"trial {i} has no reference for {', '.join(missing)}")


def ensemble_accuracy(trials, tolerance_bpm):
    """Fraction of trials whose breathing and heart estimates are both within tolerance.

    A kind with no confident window counts as outside tolerance.
    """
    _require_references(trials)
    hits = 0
    for report in trials:
        means = report.mean_bpm
        hits += all(
            means[kind] is not None and abs(means[kind] - report.reference_bpm[kind]) <= tolerance_bpm
            for kind in VitalKind
        )
    return hits / len(trials)


def mean_error_pct(trials, kind, missing_error=100.0):
    """Mean absolute error percentage of one kind across trials.

    Trials without a confident estimate contribute ``missing_error``.
    """
    _require_references(trials)
    kind = VitalKind(kind)
    errors = [report.error_pct.get(kind, missing_error) for report in trials]
    return math.fsum(errors) / len(errors)


def mean_variance(trials, kind):
    """Mean per-trial estimation variance of one kind, skipping empty trials."""
    kind = VitalKind(kind)
    values = [r.variance_bpm[kind] for r in trials if r.variance_bpm[kind] is not None]
    return math.fsum(values) / len(values) if values else math.nan
