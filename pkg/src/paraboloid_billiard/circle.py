"""Orbits whose reflection points all lie on one horizontal circle.

Every arc of such an orbit is a rotated copy of one symmetric parabola
joining two reflection points an azimuth ``theta`` apart (the step angle).
The launch velocity at ``(r0, 0, z0)`` is fixed by ``theta``, ``r0`` and the
mirror, and all arcs lie on the rotational surface
``z = r0**2 / (4 f_M) - f_M r**2 / r0**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dynamics import ParticleState
from .exceptions import OutOfRange
from .geometry import MirrorConfig, mirror_height

__all__ = [
    "CircleOrbitSpec",
    "circle_velocities",
    "initial_state",
    "step_angle",
    "flight_surface",
    "flight_surface_interval",
    "Periodic",
    "NonPeriodic",
    "classify_orbit",
    "perpendicularity_check",
]


@dataclass(frozen=True)
class CircleOrbitSpec:
    """Reflection-circle radius ``r0`` and step angle ``theta`` in ``(0, pi]``."""

    r0: float
    theta: float

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError(f"r0 must be > 0, got {self.r0!r}")
        if not 0 < self.theta <= math.pi:
            raise ValueError(f"theta must lie in (0, pi], got {self.theta!r}")

    def z0(self, m: MirrorConfig) -> float:
        """Height of the reflection circle on the mirror."""
        return float(mirror_height(self.r0, m))


def circle_velocities(spec: CircleOrbitSpec, m: MirrorConfig) -> tuple[float, float, float]:
    """Cylindrical launch velocity ``(v_r, v_phi, v_z)`` at ``(r0, 0, z0)``.

    The particle travels counter-clockwise seen from above.
    """
    c = math.cos(spec.theta)
    gf = m.g * m.f_M
    k = spec.r0 / (2.0 * m.f_M)
    v_r = -k * math.sqrt(gf * (1.0 - c))
    v_phi = k * math.sqrt(gf * (1.0 + c))
    v_z = math.sqrt(gf * (1.0 - c))
    return v_r, v_phi, v_z


def initial_state(spec: CircleOrbitSpec, m: MirrorConfig) -> ParticleState:
    """Launch state on the reflection circle at azimuth 0."""
    v_r, v_phi, v_z = circle_velocities(spec, m)
    return ParticleState([spec.r0, 0.0, spec.z0(m)], [v_r, v_phi, v_z])


def step_angle(v_r: float, v_phi: float) -> float:
    """Azimuth between consecutive reflection points, ``pi - 2 atan|v_phi / v_r|``."""
    if v_r == 0 and v_phi == 0:
        raise ValueError("step angle undefined for zero horizontal velocity")
    return math.pi - 2.0 * math.atan2(abs(v_phi), abs(v_r))


def flight_surface_interval(spec: CircleOrbitSpec) -> tuple[float, float]:
    return spec.r0 * math.cos(spec.theta / 2.0), spec.r0


def flight_surface(r, spec: CircleOrbitSpec, m: MirrorConfig):
    """Height of the surface of revolution swept by the arcs, at radius ``r``."""
    r = np.asarray(r, dtype=float)
    lo, hi = flight_surface_interval(spec)
    slack = 1e-12 * spec.r0
    if np.any(r < lo - slack) or np.any(r > hi + slack):
        raise OutOfRange(f"r must lie in [{lo}, {hi}]")
    h = spec.r0 ** 2 / (4.0 * m.f_M) - m.f_M * r * r / spec.r0 ** 2
    return float(h) if h.ndim == 0 else h


@dataclass(frozen=True)
class Periodic:
    q: int


@dataclass(frozen=True)
class NonPeriodic:
    pass


def _convergents(x: Fraction):
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    while True:
        a = x.numerator // x.denominator
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield p, q
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def classify_orbit(theta: float, tol: float = 1e-9, max_period: int = 10 ** 6):
    """Return ``Periodic(q)`` for the least ``q <= max_period`` with
    ``|q theta - 2 pi p| < tol`` for some integer ``p``, else ``NonPeriodic()``.

    Any such ``q`` is a continued-fraction convergent of ``theta / (2 pi)``
    (Legendre), so only convergents are examined.
    """
    if not 0 < theta <= math.pi:
        raise ValueError(f"theta must lie in (0, pi], got {theta!r}")
    x = Fraction(theta / (2.0 * math.pi))
    for p, q in _convergents(x):
        if q > max_period:
            break
        if q > 0 and abs(q * theta - 2.0 * math.pi * p) < tol:
            return Periodic(q)
    return NonPeriodic()


def perpendicularity_check(spec: CircleOrbitSpec, m: MirrorConfig, velocities=None,
                           tol: float = 1e-9) -> bool:
    """Whether the meridional velocity ``(v_r, v_z)`` is parallel to the mirror
    normal at the reflection point.

    ``velocities`` overrides the ``(v_r, v_phi, v_z)`` from
    :func:`circle_velocities`.
    """
    v_r, _, v_z = circle_velocities(spec, m) if velocities is None else velocities
    n_r, n_z = -spec.r0 / (2.0 * m.f_M), 1.0
    cross = (v_r * n_z - v_z * n_r) / (math.hypot(v_r, v_z) * math.hypot(n_r, n_z))
    return abs(cross) < tol
