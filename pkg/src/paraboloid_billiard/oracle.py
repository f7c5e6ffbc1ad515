"""Brute-force reference propagator.

Integrates ``x'' = -g e_z`` with fixed-step classical Runge-Kutta and
localizes the wall crossing by bisecting on the sign of the mirror function.
The ballistic solution is quadratic in time, which RK4 reproduces exactly
up to rounding, so the accuracy is set by the bisection tolerance alone.

Nothing here calls into the closed-form bounce map; it exists to check it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ParticleState
from .exceptions import MaxStepsExceeded
from .geometry import MirrorConfig

__all__ = ["OracleConfig", "OracleImpact", "oracle_step", "oracle_simulate"]


@dataclass(frozen=True)
class OracleConfig:
    """Step size, bisection tolerance (both times) and step budget.

    ``None`` picks scale-free defaults from the mirror:
    ``dt = 1e-3 sqrt(f_M / g)`` and ``bisection_tol = 1e-12 sqrt(f_M / g)``.
    """

    dt: float | None = None
    bisection_tol: float | None = None
    max_steps: int = 10 ** 7

    def resolved(self, m: MirrorConfig) -> "OracleConfig":
        ts = math.sqrt(m.f_M / m.g)
        dt = 1e-3 * ts if self.dt is None else self.dt
        tol = 1e-12 * ts if self.bisection_tol is None else self.bisection_tol
        if not dt > 0:
            raise ValueError("dt must be > 0")
        if not 0 < tol < dt:
            raise ValueError("bisection_tol must lie in (0, dt)")
        return OracleConfig(dt, tol, self.max_steps)


@dataclass(frozen=True)
class OracleImpact:
    point: np.ndarray
    velocity: np.ndarray
    time: float


def _rk4(x, y, z, vx, vy, vz, h, g):
    # y' = (v, a) with a = (0, 0, -g); spelled out stage by stage
    k1 = (vx, vy, vz, -g)
    k2 = (vx, vy, vz + 0.5 * h * k1[3], -g)
    k3 = (vx, vy, vz + 0.5 * h * k2[3], -g)
    k4 = (vx, vy, vz + h * k3[3], -g)
    x += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    y += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    z += h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    vz += h / 6.0 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
    return x, y, z, vx, vy, vz


def _mirror(x, y, z, f):
    return z - (x * x + y * y) / (4.0 * f) + f


def oracle_step(s: ParticleState, m: MirrorConfig, cfg: OracleConfig | None = None) -> OracleImpact:
    """Integrate from ``s`` until the mirror function turns negative and
    bisect the crossing time."""
    cfg = (cfg or OracleConfig()).resolved(m)
    f, g, dt = m.f_M, m.g, cfg.dt
    state = tuple(float(c) for c in (*s.pos, *s.vel))
    t = 0.0
    # a start on the wall counts as inside until the first step leaves it
    for _ in range(cfg.max_steps):
        nxt = _rk4(*state, dt, g)
        if _mirror(*nxt[:3], f) < 0.0:
            break
        state = nxt
        t += dt
    else:
        raise MaxStepsExceeded(f"no crossing within {cfg.max_steps} steps")
    lo, hi = 0.0, dt
    while hi - lo > cfg.bisection_tol:
        mid = 0.5 * (lo + hi)
        probe = _rk4(*state, mid, g)
        if _mirror(*probe[:3], f) < 0.0:
            hi = mid
        else:
            lo = mid
    tau = 0.5 * (lo + hi)
    x, y, z, vx, vy, vz = _rk4(*state, tau, g)
    return OracleImpact(np.array([x, y, z]), np.array([vx, vy, vz]), t + tau)


def _specular(p, v, m):
    grad = np.array([-p[0] / (2.0 * m.f_M), -p[1] / (2.0 * m.f_M), 1.0])
    return v - 2.0 * (v @ grad) / (grad @ grad) * grad


def oracle_simulate(s0: ParticleState, n_bounces: int, m: MirrorConfig,
                    cfg: OracleConfig | None = None) -> list[OracleImpact]:
    """Impacts of ``n_bounces`` consecutive flights, reflecting specularly."""
    impacts = []
    s = s0
    for _ in range(n_bounces):
        hit = oracle_step(s, m, cfg)
        impacts.append(hit)
        s = ParticleState(hit.point, _specular(hit.point, hit.velocity, m))
    return impacts
