"""Lambertian optical channel.

Two views of the same channel are provided:

* :func:`received_power_geometric` evaluates the full Lambertian link
  equation from source power, detector area and the two link angles.
* :func:`received_power_from_distance` uses the fitted power law
  ``P = K * d**-gamma`` with ``K`` given in dB.

``K`` is interpreted as ``10*log10`` of the received power in watts for a
reflector at 1 m, with distances in meters. With the default channel the
two views agree on boresight at every distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FieldOfViewError, ValidationError

DEFAULT_SYSTEM_CONSTANT_DB = -111.2
DEFAULT_PATH_LOSS_EXPONENT = 3.238
# Thorlabs PDA100A active area, 10 mm x 10 mm.
DEFAULT_DETECTOR_AREA = 1e-4


def lambertian_order(half_power_semi_angle):
    """Return the Lambertian order ``n = -ln 2 / ln cos(phi_half)``.

    Raises
    ------
    DomainError
        If the angle is not strictly inside ``(0, pi/2)``.
    """
    angle = float(half_power_semi_angle)
    if not 0.0 < angle < math.pi / 2:
        raise DomainError(f"half-power semi-angle must lie in (0, pi/2), got {angle!r}")
    cos_angle = math.cos(angle)
    if cos_angle >= 1.0:
        raise DomainError(f"half-power semi-angle {angle!r} is too small to resolve")
    return -math.log(2.0) / math.log(cos_angle)


@dataclass(frozen=True)
class LambertianChannel:
    """Transmitter/receiver parameters and the fitted path-loss constants.

    ``transmit_power`` defaults to the value that makes the geometric link
    equation reproduce ``system_constant_db`` on boresight.
    """

    half_power_semi_angle: float = math.pi / 3
    path_loss_exponent: float = DEFAULT_PATH_LOSS_EXPONENT
    system_constant_db: float = DEFAULT_SYSTEM_CONSTANT_DB
    detector_area: float = DEFAULT_DETECTOR_AREA
    transmit_power: float | None = None
    lambertian_order: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        order = lambertian_order(self.half_power_semi_angle)
        object.__setattr__(self, "lambertian_order", order)
        if not (math.isfinite(self.path_loss_exponent) and self.path_loss_exponent > 0):
            raise ValidationError(f"path-loss exponent must be positive, got {self.path_loss_exponent!r}")
        if not math.isfinite(self.system_constant_db):
            raise ValidationError("system constant must be finite")
        if not (math.isfinite(self.detector_area) and self.detector_area > 0):
            raise ValidationError(f"detector area must be positive, got {self.detector_area!r}")
        if self.transmit_power is None:
            matched = self.system_constant * 2 * math.pi / ((order + 1) * self.detector_area)
            object.__setattr__(self, "transmit_power", matched)
        elif not (math.isfinite(self.transmit_power) and self.transmit_power > 0):
            raise ValidationError(f"transmit power must be positive, got {self.transmit_power!r}")

    @property
    def system_constant(self):
        """Linear ``K`` in watts at 1 m."""
        return 10.0 ** (self.system_constant_db / 10.0)


def _check_distance(distance):
    d = np.asarray(distance, dtype=float)
    if not np.all(np.isfinite(d)) or np.any(d <= 0):
        raise DomainError("distance must be finite and strictly positive")
    return d


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def received_power_geometric(channel, distance, irradiance_angle=0.0, incidence_angle=0.0):
    """Received power from the full Lambertian link equation.

    ``(n+1) A_R P_t cos^n(phi) cos(theta) / (2 pi d^gamma)``, valid only for
    ``theta`` strictly below the half-power semi-angle.
    """
    d = _check_distance(distance)
    phi = float(irradiance_angle)
    theta = float(incidence_angle)
    if not 0.0 <= phi < math.pi / 2:
        raise DomainError(f"irradiance angle must lie in [0, pi/2), got {phi!r}")
    if theta < 0.0:
        raise DomainError(f"incidence angle must be non-negative, got {theta!r}")
    if theta >= channel.half_power_semi_angle:
        raise FieldOfViewError(
            f"incidence angle {theta!r} rad is outside the field of view "
            f"(< {channel.half_power_semi_angle!r} rad)"
        )
    n = channel.lambertian_order
    gain = (n + 1) * channel.detector_area * channel.transmit_power / (2 * math.pi)
    gain *= math.cos(phi) ** n * math.cos(theta)
    return _scalar_or_array(gain * d ** (-channel.path_loss_exponent), distance)


def received_power_from_distance(channel, distance):
    """Received power from the fitted law ``K * d**-gamma`` (``d`` in meters)."""
    d = _check_distance(distance)
    return _scalar_or_array(channel.system_constant * d ** (-channel.path_loss_exponent), distance)


def position_geometry(x, y):
    """Distance and link angle for a reflector at ``(x, y)``.

    The co-located source and detector sit at the origin looking along +y,
    so irradiance and incidence angles coincide.
    """
    if not (math.isfinite(x) and math.isfinite(y)) or y <= 0:
        raise DomainError(f"position must lie in front of the sensor (y > 0), got ({x!r}, {y!r})")
    return math.hypot(x, y), math.atan2(abs(x), y)


def received_power_at_position(channel, x, y):
    """Geometric received power for a reflector at ``(x, y)`` meters."""
    distance, angle = position_geometry(x, y)
    return received_power_geometric(channel, distance, angle, angle)
