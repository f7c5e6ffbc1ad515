"""Paraboloid mirror geometry.

The mirror is the surface ``M(x, y, z) = z - (x**2 + y**2) / (4 f_M) + f_M = 0``
with its focus at the origin. ``M > 0`` is the interior (above the bowl).
Points and vectors are plain ``numpy`` arrays of shape ``(3,)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import OffBoundary

__all__ = [
    "MirrorConfig",
    "boundary_value",
    "boundary_gradient",
    "inward_normal",
    "boundary_point",
    "mirror_height",
]


@dataclass(frozen=True)
class MirrorConfig:
    """Focal length of the mirror and gravitational acceleration.

    The particle has unit mass; both parameters default to 1
    (nondimensional units).
    """

    f_M: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        for name in ("f_M", "g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def tol_boundary(self) -> float:
        """Absolute tolerance for "on the boundary" checks."""
        return 1e-9 * max(1.0, self.f_M)

    @property
    def time_scale(self) -> float:
        return math.sqrt(self.f_M / self.g)

    @property
    def speed_scale(self) -> float:
        return math.sqrt(self.f_M * self.g)


def boundary_value(p, m: MirrorConfig):
    """Evaluate ``M`` at ``p``; vectorized over a trailing axis of length 3.

    Zero on the mirror, positive inside, negative outside.
    """
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return z - (x * x + y * y) / (4.0 * m.f_M) + m.f_M


def boundary_gradient(p, m: MirrorConfig) -> np.ndarray:
    """Unnormalized gradient of ``M``. Points into the mirror."""
    p = np.asarray(p, dtype=float)
    return np.array([-p[0] / (2.0 * m.f_M), -p[1] / (2.0 * m.f_M), 1.0])


def inward_normal(p, m: MirrorConfig, check: bool = True) -> np.ndarray:
    """Unit normal of the mirror at boundary point ``p``, pointing inside.

    Raises :class:`OffBoundary` if ``|M(p)|`` exceeds ``m.tol_boundary``
    (skip with ``check=False``).
    """
    if check:
        value = boundary_value(p, m)
        if abs(value) > m.tol_boundary:
            raise OffBoundary(f"point {p} is off the mirror (M = {value:.3e})")
    grad = boundary_gradient(p, m)
    return grad / np.linalg.norm(grad)


def mirror_height(r, m: MirrorConfig):
    """Height of the mirror surface at radial distance ``r``."""
    r = np.asarray(r, dtype=float)
    return r * r / (4.0 * m.f_M) - m.f_M


def boundary_point(r: float, azimuth: float, m: MirrorConfig) -> np.ndarray:
    """Point on the mirror at radius ``r`` and azimuth ``azimuth``."""
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r!r}")
    x, y = r * math.cos(azimuth), r * math.sin(azimuth)
    # height from the rounded x, y so that M cancels exactly up to one rounding
    return np.array([x, y, (x * x + y * y) / (4.0 * m.f_M) - m.f_M])
