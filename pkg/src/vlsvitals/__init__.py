"""Visible-light vital-signs simulation and estimation."""

from .dsp import BandSpec, PipelineConfig, estimate_vitals
from .metrics import VitalKind, VitalsReport, absolute_error_pct, ensemble_accuracy
from .optics import LambertianChannel, received_power_from_distance, received_power_geometric
from .physio import AdcModel, NoiseModel, SubjectMotion, synthesize_trace
from .trace import Trace, read_trace, write_trace

__version__ = "0.1.0"
