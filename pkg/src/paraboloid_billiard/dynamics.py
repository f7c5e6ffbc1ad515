"""Exact event-driven bounce map for the paraboloid gravitational billiard.

Between reflections the particle follows the ballistic arc
``r(t) = r0 + v t - g t**2 / 2 e_z``. Substituting the arc into the mirror
equation gives a quadratic in ``t`` whose leading coefficient
``-g/2 - (vx**2 + vy**2) / (4 f_M)`` is always negative, so the next impact
is a closed-form root. Reflection is specular about the inward normal.

Per-arc quantities:

* directrix height ``H = |v|**2 / (2 g) + z`` (energy per unit weight),
* reduced angular momentum ``l_z = x vy - y vx``,
* focal length ``F = (vx**2 + vy**2) / (2 g)``,
* focus ``(x + vx vz / g, y + vy vz / g, 2 z - H + vz**2 / g)``, whose
  distance ``R`` from the mirror focus is the same for every arc.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .exceptions import Grazing, NoImpact, OutgoingVelocity
from .geometry import MirrorConfig, boundary_gradient, boundary_value

__all__ = [
    "ParticleState",
    "ConservedTriple",
    "FlightSegment",
    "Trajectory",
    "fly",
    "impact_time",
    "reflect",
    "focus",
    "focal_length",
    "vertex",
    "conserved",
    "step",
    "simulate",
    "tol_graze",
    "random_interior_states",
]


def tol_graze(m: MirrorConfig) -> float:
    """Impact times below this are treated as "still at the current impact"."""
    return 1e-10 * m.time_scale


def _as_vec(v) -> np.ndarray:
    arr = np.array(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite vector {v!r}")
    return arr


@dataclass(frozen=True, eq=False)
class ParticleState:
    """Position and velocity of the unit-mass particle."""

    pos: np.ndarray
    vel: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pos", _as_vec(self.pos))
        object.__setattr__(self, "vel", _as_vec(self.vel))

    def __eq__(self, other):
        if not isinstance(other, ParticleState):
            return NotImplemented
        return np.array_equal(self.pos, other.pos) and np.array_equal(self.vel, other.vel)

    def __repr__(self):
        return f"ParticleState(pos={self.pos.tolist()}, vel={self.vel.tolist()})"

    def is_inside(self, m: MirrorConfig) -> bool:
        return bool(boundary_value(self.pos, m) >= -m.tol_boundary)


@dataclass(frozen=True)
class ConservedTriple:
    H: float
    l_z: float
    R: float


@dataclass(frozen=True, eq=False)
class FlightSegment:
    """One ballistic arc between reflections.

    ``start`` is the state just after the previous reflection (or launch),
    ``end`` the state just before the next one, and ``reflected`` the state
    just after it, i.e. the start of the following segment.
    """

    start: ParticleState
    impact_time: float
    end: ParticleState
    reflected: ParticleState
    focus: np.ndarray
    focal_length: float
    vertex: np.ndarray


def fly(s: ParticleState, t: float, m: MirrorConfig) -> ParticleState:
    """Advance ``s`` along its ballistic arc by time ``t >= 0``."""
    if t < 0:
        raise ValueError(f"flight time must be non-negative, got {t!r}")
    pos = s.pos + s.vel * t
    pos[2] -= 0.5 * m.g * t * t
    vel = s.vel.copy()
    vel[2] -= m.g * t
    return ParticleState(pos, vel)


def _impact_root(x, y, z, vx, vy, vz, f, g, tol_c, tol_t, tol_v):
    r2 = x * x + y * y
    a = -0.5 * g - (vx * vx + vy * vy) / (4.0 * f)
    b = vz - (x * vx + y * vy) / (2.0 * f)
    c = z - r2 / (4.0 * f) + f
    if c < -tol_c:
        raise NoImpact(f"state is outside the mirror (M = {c:.3e})")
    if abs(c) <= tol_c:
        v_normal = b / math.sqrt(1.0 + r2 / (4.0 * f * f))
        if v_normal <= tol_v:
            if v_normal > -tol_v:
                raise Grazing(f"tangential velocity at the boundary (v.n = {v_normal:.3e})")
            raise NoImpact(f"velocity points out of the mirror (v.n = {v_normal:.3e})")
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise NoImpact(f"no real impact root (discriminant {disc:.3e})")
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0.0:
        raise Grazing("double root at t = 0")
    t = max(q / a, c / q)
    if t <= tol_t:
        if t > 0.0 or abs(c) <= tol_c:
            raise Grazing(f"forward root {t:.3e} below grazing tolerance")
        raise NoImpact(f"no positive impact root (largest root {t:.3e})")
    return t


def impact_time(s: ParticleState, m: MirrorConfig) -> float:
    """Time until ``s`` next meets the mirror.

    Uses the cancellation-free quadratic formula. A state sitting on the
    boundary has ``t = 0`` as a root; that root is skipped.

    Raises :class:`Grazing` for tangential contact and :class:`NoImpact` for
    states outside the mirror or leaving it.
    """
    tol_t = tol_graze(m)
    return _impact_root(
        *s.pos, *s.vel, m.f_M, m.g, m.tol_boundary, tol_t, tol_t * m.g
    )


def reflect(p, v_in, m: MirrorConfig) -> np.ndarray:
    """Specular reflection ``v - 2 (n . v) n`` at boundary point ``p``.

    ``v_in`` must point out of the mirror (``v_in . n < 0``).
    """
    grad = boundary_gradient(p, m)
    v_in = np.asarray(v_in, dtype=float)
    dot = float(v_in @ grad)
    if dot >= 0.0:
        raise OutgoingVelocity(f"velocity {v_in} is not incoming at {p} (v.gradM = {dot:.3e})")
    return v_in - (2.0 * dot / float(grad @ grad)) * grad


def focus(s: ParticleState, m: MirrorConfig) -> np.ndarray:
    """Focus of the flight parabola through ``s``."""
    x, y, z = s.pos
    vx, vy, vz = s.vel
    g = m.g
    H = (vx * vx + vy * vy + vz * vz) / (2.0 * g) + z
    return np.array([x + vx * vz / g, y + vy * vz / g, 2.0 * z - H + vz * vz / g])


def focal_length(s: ParticleState, m: MirrorConfig) -> float:
    vx, vy, _ = s.vel
    return (vx * vx + vy * vy) / (2.0 * m.g)


def vertex(s: ParticleState, m: MirrorConfig) -> np.ndarray:
    """Apex of the flight parabola through ``s``, reached at ``t = vz / g``."""
    x, y, z = s.pos
    vx, vy, vz = s.vel
    tv = vz / m.g
    return np.array([x + vx * tv, y + vy * tv, z + vz * vz / (2.0 * m.g)])


def conserved(s: ParticleState, m: MirrorConfig) -> ConservedTriple:
    """Directrix height, reduced angular momentum and foci-sphere radius."""
    x, y, z = s.pos
    vx, vy, vz = s.vel
    H = float(s.vel @ s.vel) / (2.0 * m.g) + z
    return ConservedTriple(
        H=float(H),
        l_z=float(x * vy - y * vx),
        R=float(np.linalg.norm(focus(s, m))),
    )


def step(s: ParticleState, m: MirrorConfig) -> FlightSegment:
    """Fly ``s`` to the next impact and reflect there."""
    t = impact_time(s, m)
    end = fly(s, t, m)
    reflected = ParticleState(end.pos, reflect(end.pos, end.vel, m))
    return FlightSegment(
        start=s,
        impact_time=t,
        end=end,
        reflected=reflected,
        focus=focus(s, m),
        focal_length=focal_length(s, m),
        vertex=vertex(s, m),
    )


class Trajectory(Sequence):
    """Result of :func:`simulate`: a sequence of :class:`FlightSegment`.

    Segment data is held column-wise in arrays; ``FlightSegment`` objects are
    built on access. ``termination`` is ``None`` when all requested bounces
    were completed, otherwise a message naming the cause.
    """

    def __init__(self, mirror, start_pos, start_vel, times, end_pos, end_vel,
                 reflected_vel, termination=None):
        self.mirror = mirror
        self.start_pos = start_pos
        self.start_vel = start_vel
        self.impact_times = times
        self.end_pos = end_pos
        self.end_vel = end_vel
        self.reflected_vel = reflected_vel
        self.termination = termination

    def __len__(self):
        return len(self.impact_times)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        start = ParticleState(self.start_pos[i], self.start_vel[i])
        m = self.mirror
        return FlightSegment(
            start=start,
            impact_time=float(self.impact_times[i]),
            end=ParticleState(self.end_pos[i], self.end_vel[i]),
            reflected=ParticleState(self.end_pos[i], self.reflected_vel[i]),
            focus=focus(start, m),
            focal_length=focal_length(start, m),
            vertex=vertex(start, m),
        )

    @property
    def completed(self) -> bool:
        return self.termination is None

    @property
    def final_state(self) -> ParticleState:
        """State just after the last reflection."""
        return ParticleState(self.end_pos[-1], self.reflected_vel[-1])

    @property
    def absolute_impact_times(self) -> np.ndarray:
        return np.cumsum(self.impact_times)

    # Column-wise derived quantities, one row per segment.

    def directrix_heights(self) -> np.ndarray:
        v = self.start_vel
        return np.einsum("ij,ij->i", v, v) / (2.0 * self.mirror.g) + self.start_pos[:, 2]

    def angular_momenta(self) -> np.ndarray:
        p, v = self.start_pos, self.start_vel
        return p[:, 0] * v[:, 1] - p[:, 1] * v[:, 0]

    def foci(self) -> np.ndarray:
        return _foci(self.start_pos, self.start_vel, self.mirror.g)

    def incoming_foci(self) -> np.ndarray:
        """Foci recomputed from the pre-impact states (same arcs, other end)."""
        return _foci(self.end_pos, self.end_vel, self.mirror.g)

    def focal_lengths(self) -> np.ndarray:
        v = self.start_vel
        return (v[:, 0] ** 2 + v[:, 1] ** 2) / (2.0 * self.mirror.g)

    def sample(self, points_per_segment: int = 8) -> np.ndarray:
        """Positions at evenly spaced times along every segment, endpoints included.

        Returns an array of shape ``(len(self), points_per_segment, 3)``.
        """
        frac = np.linspace(0.0, 1.0, points_per_segment)
        t = self.impact_times[:, None] * frac[None, :]
        pts = self.start_pos[:, None, :] + self.start_vel[:, None, :] * t[..., None]
        pts[..., 2] -= 0.5 * self.mirror.g * t * t
        return pts


def _foci(pos, vel, g):
    vsq = np.einsum("ij,ij->i", vel, vel)
    H = vsq / (2.0 * g) + pos[:, 2]
    vz = vel[:, 2]
    return np.column_stack([
        pos[:, 0] + vel[:, 0] * vz / g,
        pos[:, 1] + vel[:, 1] * vz / g,
        2.0 * pos[:, 2] - H + vz * vz / g,
    ])


def simulate(
    s0: ParticleState,
    n_bounces: int,
    m: MirrorConfig,
    reflection: Callable | None = None,
) -> Trajectory:
    """Iterate the bounce map ``n_bounces`` times starting from ``s0``.

    On grazing contact or a lost impact the run stops early and the cause is
    stored in ``Trajectory.termination``. ``reflection(p, v, m)`` replaces the
    specular law, e.g. to inject faults in verification runs.
    """
    if n_bounces < 0:
        raise ValueError("n_bounces must be >= 0")
    f, g = m.f_M, m.g
    tol_c, tol_t = m.tol_boundary, tol_graze(m)
    tol_v = tol_t * g
    rows_start = []
    rows_end = []
    times = []
    refl = []
    termination = None
    x, y, z = (float(c) for c in s0.pos)
    vx, vy, vz = (float(c) for c in s0.vel)
    for _ in range(n_bounces):
        try:
            t = _impact_root(x, y, z, vx, vy, vz, f, g, tol_c, tol_t, tol_v)
        except (Grazing, NoImpact) as exc:
            termination = f"{type(exc).__name__}: {exc}"
            break
        ex = x + vx * t
        ey = y + vy * t
        ez = z + vz * t - 0.5 * g * t * t
        evz = vz - g * t
        gx, gy = -ex / (2.0 * f), -ey / (2.0 * f)
        dot = vx * gx + vy * gy + evz
        if reflection is None:
            if dot >= 0.0:
                termination = f"Grazing: non-incoming velocity at impact (v.gradM = {dot:.3e})"
                break
            k = 2.0 * dot / (gx * gx + gy * gy + 1.0)
            rvx, rvy, rvz = vx - k * gx, vy - k * gy, evz - k
        else:
            try:
                rvx, rvy, rvz = (float(c) for c in reflection(
                    np.array([ex, ey, ez]), np.array([vx, vy, evz]), m))
            except OutgoingVelocity as exc:
                termination = f"Grazing: {exc}"
                break
        rows_start.append((x, y, z, vx, vy, vz))
        rows_end.append((ex, ey, ez, vx, vy, evz))
        times.append(t)
        refl.append((rvx, rvy, rvz))
        x, y, z, vx, vy, vz = ex, ey, ez, rvx, rvy, rvz
    start = np.array(rows_start, dtype=float).reshape(-1, 6)
    end = np.array(rows_end, dtype=float).reshape(-1, 6)
    return Trajectory(
        m,
        start[:, :3], start[:, 3:],
        np.array(times, dtype=float),
        end[:, :3], end[:, 3:],
        np.array(refl, dtype=float).reshape(-1, 3),
        termination,
    )


def random_interior_states(
    rng: np.random.Generator,
    n: int,
    m: MirrorConfig,
    pos_box=None,
    speed: float | None = None,
) -> list[ParticleState]:
    """Draw ``n`` states uniformly in a box, rejection-sampled to the interior.

    ``pos_box`` is ``((xlo, ylo, zlo), (xhi, yhi, zhi))``; the default spans
    ``|x|, |y| <= 2 f_M`` and ``-f_M <= z <= 2 f_M``. Velocity components are
    uniform in ``[-speed, speed]`` (default ``sqrt(g f_M)``).
    """
    f = m.f_M
    if pos_box is None:
        pos_box = ((-2 * f, -2 * f, -f), (2 * f, 2 * f, 2 * f))
    lo, hi = (np.asarray(b, dtype=float) for b in pos_box)
    speed = m.speed_scale if speed is None else speed
    states = []
    while len(states) < n:
        pos = rng.uniform(lo, hi)
        vel = rng.uniform(-speed, speed, size=3)
        # keep a margin from the wall so the first flight is not near-grazing
        if boundary_value(pos, m) > 1e-3 * f:
            states.append(ParticleState(pos, vel))
    return states
