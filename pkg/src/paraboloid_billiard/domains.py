"""Confined domains for given directrix height ``H``, foci-sphere radius ``R``
and reduced angular momentum ``l_z``.

Every arc has its focus on the sphere of radius ``R``; with the azimuth
fixed to 0 an arc is labelled by the polar angle ``theta`` of its focus.
The vertex sits at ``(R sin theta, 0, (H + R cos theta) / 2)`` and the arc
exists only where

    J(theta) = g R**2 sin(theta)**2 (H - R cos theta) >= l_z**2.

The region a trajectory can visit is bounded by the envelope of this
one-parameter family in the ``(r, z)`` half-plane. Envelopes are extracted
numerically by extremizing the arc heights over ``theta`` at each radius.
The closed-form limiting curves (``l_z = 0``, small, large and maximal
``l_z``) are provided alongside for comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .dynamics import ParticleState, conserved
from .exceptions import DegenerateSphere, EmptyInterval, OutOfRange
from .geometry import MirrorConfig, mirror_height

__all__ = [
    "DomainSpec",
    "VertexData",
    "EnvelopeCurve",
    "J",
    "theta_max",
    "J_max",
    "admissible_theta",
    "r_min",
    "height_pair",
    "parabola_family",
    "vertex_data",
    "envelope",
    "inner_barrier",
    "limit_c_pm",
    "limit_c0",
    "c0_coefficients",
    "limit_c_tilde",
    "limit_d",
    "max_lz_accessible",
    "clip_to_mirror",
    "SMALL_LZ_FRACTION",
    "LARGE_LZ_FRACTION",
]

# l_z**2 / J_max bounds of the "small" and "large" angular momentum regimes
SMALL_LZ_FRACTION = 1e-2
LARGE_LZ_FRACTION = 0.5

# relative slack on l_z**2 <= J_max, so that l_z = sqrt(J_max) is accepted
_SATURATION_RTOL = 1e-12


def _jmax(H, R, g):
    # arcs need a real vertex speed somewhere, H - R cos(theta) >= 0, i.e. H >= -R;
    # otherwise no motion exists (-1 sentinel). R = 0 leaves J identically zero.
    if H < -R:
        return -1.0
    if R == 0:
        return 0.0
    s = math.sqrt(H * H + 3.0 * R * R)
    r2 = 3.0 * R * R
    # cancellation-free forms of s - H and s + 2H
    s_minus_h = r2 / (s + H) if H > 0 else s - H
    s_plus_2h = s + 2.0 * H if H >= 0 else (r2 - 3.0 * H * H) / (s - 2.0 * H)
    return (2.0 / 27.0) * g * s_plus_2h * (H * s_minus_h + r2)


@dataclass(frozen=True)
class DomainSpec:
    """Conserved triple ``(H, R, l_z)`` plus the mirror."""

    H: float
    R: float
    l_z: float
    mirror: MirrorConfig = field(default_factory=MirrorConfig)

    def __post_init__(self):
        if not self.R >= 0:
            raise ValueError(f"R must be >= 0, got {self.R!r}")
        if not self.H > -self.mirror.f_M:
            raise ValueError(f"H must exceed -f_M = {-self.mirror.f_M}, got {self.H!r}")
        jm = float(_jmax(self.H, self.R, self.mirror.g))
        if self.l_z ** 2 > jm + _SATURATION_RTOL * abs(jm) or jm < 0:
            raise EmptyInterval(
                f"l_z**2 = {self.l_z ** 2:.17g} exceeds J_max = {jm:.17g}; no motion exists",
                j_max=jm,
            )

    @classmethod
    def from_state(cls, s: ParticleState, m: MirrorConfig) -> "DomainSpec":
        c = conserved(s, m)
        return cls(H=c.H, R=c.R, l_z=c.l_z, mirror=m)

    @property
    def g(self) -> float:
        return self.mirror.g

    @property
    def saturated(self) -> bool:
        """Whether ``l_z**2 == J_max`` up to rounding."""
        jm = J_max(self)
        return jm - self.l_z ** 2 <= _SATURATION_RTOL * max(jm, 1e-300)


@dataclass(frozen=True)
class VertexData:
    theta: float
    vertex: np.ndarray
    v_S: float
    phi_prime: float


@dataclass(frozen=True, eq=False)
class EnvelopeCurve:
    """Sampled curve in the ``(r, z)`` half-plane.

    ``theta`` holds the polar angle of the touching arc at each sample, when
    known. ``gaps`` lists radii where no arc of the family reaches.
    """

    label: str
    r: np.ndarray
    z: np.ndarray
    theta: np.ndarray | None = None
    gaps: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if r.shape != z.shape:
            raise ValueError("r and z must have the same shape")
        if np.any(np.diff(r) <= 0):
            raise ValueError("r must be strictly increasing")
        if not np.all(np.isfinite(z)):
            raise ValueError("z must be finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "z", z)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.r.tolist(), self.z.tolist()))

    def __call__(self, r):
        """Linear interpolation between samples (nan outside the sampled range)."""
        return np.interp(r, self.r, self.z, left=np.nan, right=np.nan)


# ---------------------------------------------------------------------------
# J function and the admissible polar-angle interval


def J(theta, spec: DomainSpec):
    """``g R**2 sin(theta)**2 (H - R cos theta)``."""
    theta = np.asarray(theta, dtype=float)
    R = spec.R
    out = spec.g * R * R * np.sin(theta) ** 2 * (spec.H - R * np.cos(theta))
    return float(out) if out.ndim == 0 else out


def theta_max(spec: DomainSpec) -> float:
    """Polar angle maximizing ``J`` on ``[0, pi]``."""
    H, R = spec.H, spec.R
    if R <= 0:
        raise DegenerateSphere("theta_max is undefined for R = 0")
    s = math.sqrt(H * H + 3.0 * R * R)
    # (H - s) / (3R), rewritten without cancellation for H > 0
    c = -R / (H + s) if H > 0 else (H - s) / (3.0 * R)
    return math.acos(min(1.0, max(-1.0, c)))


def J_max(spec: DomainSpec) -> float:
    """Closed-form maximum of ``J``; the largest admissible ``l_z**2``."""
    return float(_jmax(spec.H, spec.R, spec.g))


def _theta_local_min(spec: DomainSpec) -> float:
    # second stationary point of J, a minimum with J < 0, present when R > H
    H, R = spec.H, spec.R
    s = math.sqrt(H * H + 3.0 * R * R)
    c = R / (s - H) if H < 0 else (H + s) / (3.0 * R)
    return 0.0 if c >= 1.0 else math.acos(c)


def admissible_theta(spec: DomainSpec) -> tuple[float, float]:
    """Interval ``[theta_0, theta_1]`` around ``theta_max`` where
    ``J >= l_z**2`` and the vertex speed is real.

    The edges are located by bisection on the monotone flanks of ``J``.
    """
    H, R, l2 = spec.H, spec.R, spec.l_z ** 2
    if R == 0:
        if l2 > 0:
            raise EmptyInterval("R = 0 admits only l_z = 0", j_max=0.0)
        return 0.0, math.pi
    jm = J_max(spec)
    if l2 > jm + _SATURATION_RTOL * abs(jm):
        raise EmptyInterval(f"l_z**2 = {l2:.17g} exceeds J_max = {jm:.17g}", j_max=jm)
    tm = theta_max(spec)
    if spec.saturated:
        return tm, tm

    def excess(th):
        return J(th, spec) - l2

    def real_speed(th):
        return H - R * math.cos(th) >= 0.0

    # left flank of J: [theta_local_min, theta_max] (or [0, theta_max] if H >= R)
    left_end = _theta_local_min(spec)
    if excess(left_end) >= 0.0 and real_speed(left_end):
        lo = left_end
    else:
        lo = optimize.bisect(excess, left_end, tm, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if excess(math.pi) >= 0.0 and real_speed(math.pi):
        hi = math.pi
    else:
        hi = optimize.bisect(excess, tm, math.pi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return lo, hi


# ---------------------------------------------------------------------------
# Arc family


def r_min(theta, spec: DomainSpec):
    """Closest approach of the ``theta`` arc to the symmetry axis."""
    theta = np.asarray(theta, dtype=float)
    w = spec.H - spec.R * np.cos(theta)
    out = abs(spec.l_z) / np.sqrt(spec.g * w)
    return float(out) if out.ndim == 0 else out


def _branches(r, theta, H, R, l2, g):
    """Arc heights ``(h_plus, h_minus)``; nan where the arc does not reach ``r``.

    Tiny negative radicands from rounding are clipped to zero.
    """
    c = np.cos(theta)
    s2 = np.sin(theta) ** 2
    w = H - R * c
    gw = g * w
    A = r * r * gw - l2
    B = R * R * s2 * gw - l2
    A = np.where((A < 0) & (A > -1e-12 * (r * r * np.abs(gw) + l2)), 0.0, A)
    B = np.where((B < 0) & (B > -1e-12 * (R * R * s2 * np.abs(gw) + l2)), 0.0, B)
    with np.errstate(invalid="ignore", divide="ignore"):
        sa = np.sqrt(A)
        sb = np.sqrt(B)
        top = 0.5 * (H + R * c)
        h_plus = top - 0.5 * g * ((sa + sb) / gw) ** 2
        h_minus = top - 0.5 * g * ((sa - sb) / gw) ** 2
    return h_plus, h_minus


def height_pair(r, theta, spec: DomainSpec):
    """Heights ``(h_plus, h_minus)`` at which the ``theta`` arc crosses radius ``r``.

    ``h_minus`` is the branch through the vertex, so ``h_plus <= h_minus``
    with equality at ``r = r_min(theta)``.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    lo, hi = admissible_theta(spec)
    slack = 1e-12
    if np.any(theta < lo - slack) or np.any(theta > hi + slack):
        raise OutOfRange(f"theta outside the admissible interval [{lo}, {hi}]")
    if np.any(r < r_min(theta, spec) * (1 - 1e-12) - 1e-15):
        raise OutOfRange("r below the minimal radial distance of the arc")
    hp, hm = _branches(r, theta, spec.H, spec.R, spec.l_z ** 2, spec.g)
    if np.any(~np.isfinite(hp)) or np.any(~np.isfinite(hm)):
        raise OutOfRange("arc heights undefined at the requested (r, theta)")
    if hp.ndim == 0:
        return float(hp), float(hm)
    return hp, hm


def parabola_family(theta, t, spec: DomainSpec) -> np.ndarray:
    """Point at time ``t`` (vertex at ``t = 0``) on the ``theta`` arc, azimuth 0.

    Vectorized over ``t``; returns shape ``t.shape + (3,)``.
    """
    t = np.asarray(t, dtype=float)
    H, R, l, g = spec.H, spec.R, spec.l_z, spec.g
    s = math.sin(theta)
    c = math.cos(theta)
    if s == 0.0 and l != 0.0:
        raise OutOfRange("arc with sin(theta) = 0 requires l_z = 0")
    w = H - R * c
    if l == 0.0:
        u = math.sqrt(max(g * w, 0.0))
        vy = 0.0
    else:
        u2 = g * w - l * l / (R * R * s * s)
        if u2 < -1e-12 * g * abs(w):
            raise OutOfRange("theta is not admissible for this l_z")
        u = math.sqrt(max(u2, 0.0))
        vy = l / (R * s)
    return np.stack(
        [R * s + t * u, t * vy, -0.5 * g * t * t + 0.5 * (H + R * c)], axis=-1
    )


def vertex_data(theta: float, spec: DomainSpec, phi: float = 0.0) -> VertexData:
    """Vertex, vertex speed and vertex-velocity azimuth of the arc whose
    focus has spherical angles ``(theta, phi)``.

    The azimuth is the outward-moving solution
    ``phi + asin(l_z / (R sin theta v_S))``; the other solution,
    ``phi + pi - asin(...)``, traces the same arc backwards.
    """
    H, R = spec.H, spec.R
    s, c = math.sin(theta), math.cos(theta)
    vertex = np.array([R * math.cos(phi) * s, R * math.sin(phi) * s, 0.5 * (H + R * c)])
    v_S = math.sqrt(max(spec.g * (H - R * c), 0.0))
    denom = R * s * v_S
    if denom == 0.0:
        if spec.l_z != 0.0:
            raise OutOfRange("vertex on the axis or at rest requires l_z = 0")
        ratio = 0.0
    else:
        ratio = spec.l_z / denom
        if abs(ratio) > 1.0 + 1e-9:
            raise OutOfRange("theta is not admissible for this l_z")
        ratio = max(-1.0, min(1.0, ratio))
    return VertexData(theta=theta, vertex=vertex, v_S=v_S, phi_prime=phi + math.asin(ratio))


# ---------------------------------------------------------------------------
# Numerical envelopes

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden(fun, a, b, iters=90):
    """Vectorized golden-section maximization of ``fun`` on ``[a, b]``."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        left = fc >= fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        keep_x = np.where(left, c, d)
        keep_f = np.where(left, fc, fd)
        new_x = np.where(left, b - _INVPHI * (b - a), a + _INVPHI * (b - a))
        new_f = fun(new_x)
        c = np.where(left, new_x, keep_x)
        fc = np.where(left, new_f, keep_f)
        d = np.where(left, keep_x, new_x)
        fd = np.where(left, keep_f, new_f)
        if np.all(b - a <= 1e-15 * np.maximum(1.0, np.abs(a))):
            break
    x = 0.5 * (a + b)
    return x, fun(x)


def _feasible_lower_theta(r, spec: DomainSpec, lo: float):
    """Smallest admissible theta whose arc reaches radius ``r`` (nan if none)."""
    l2 = spec.l_z ** 2
    if l2 == 0.0 or spec.R == 0.0:
        return np.full_like(r, lo)
    with np.errstate(divide="ignore"):
        ratio = (spec.H - l2 / (spec.g * r * r)) / spec.R
    th = np.arccos(np.clip(ratio, -1.0, 1.0))
    th = np.where(ratio < -1.0, np.nan, th)
    return np.maximum(th, lo)


def _extremize(r, spec: DomainSpec, which: str, n_scan: int):
    """Max of ``h_minus`` (``which='upper'``) or min of ``h_plus`` over the
    theta arcs reaching each radius. Returns ``(value, theta, feasible)``."""
    lo, hi = admissible_theta(spec)
    H, R, l2, g = spec.H, spec.R, spec.l_z ** 2, spec.g
    if R == 0:
        return _extremize_point_sphere(r, spec, which)
    a = _feasible_lower_theta(r, spec, lo)
    feasible = np.isfinite(a) & (a <= hi)
    a = np.where(feasible, a, lo)
    b = np.full_like(a, hi)
    sign = 1.0 if which == "upper" else -1.0

    def objective(th, rr):
        hp, hm = _branches(rr, th, H, R, l2, g)
        val = sign * (hm if which == "upper" else hp)
        return np.where(np.isfinite(val), val, -np.inf)

    frac = np.linspace(0.0, 1.0, n_scan)
    grid = a[:, None] + (b - a)[:, None] * frac[None, :]
    vals = objective(grid, r[:, None])
    k = np.argmax(vals, axis=1)
    idx = np.arange(len(r))
    best_th = grid[idx, k]
    best = vals[idx, k]
    k_lo = np.maximum(k - 1, 0)
    k_hi = np.minimum(k + 1, n_scan - 1)
    x, fx = _golden(lambda th: objective(th, r), grid[idx, k_lo], grid[idx, k_hi])
    better = fx > best
    best_th = np.where(better, x, best_th)
    best = np.where(better, fx, best)
    return sign * best, best_th, feasible


def _extremize_point_sphere(r, spec: DomainSpec, which: str):
    # R = 0: every arc has its focus at the origin, so the family is one curve
    H = spec.H
    theta = np.full_like(r, 0.5 * math.pi)
    if H > 0:
        return 0.5 * H - r * r / (2.0 * H), theta, np.ones(r.shape, bool)
    # H = 0: vertical fall along the axis below z = 0
    on_axis = r == 0.0
    val = np.where(on_axis, 0.0 if which == "upper" else -np.inf, np.nan)
    return val, theta, on_axis


def envelope(spec: DomainSpec, r_grid, n_scan: int = 2048) -> list[EnvelopeCurve]:
    """Envelope curves of the arc family over the radii ``r_grid``.

    Returns ``upper`` and ``lower`` curves (plus ``inner_barrier`` for
    ``l_z != 0``), or a single ``max_lz`` curve when ``l_z**2 = J_max``.
    Radii that no admissible arc reaches are left out and listed in
    ``gaps``; so are radii where the lower envelope is unbounded.
    """
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or np.any(np.diff(r) <= 0) or np.any(r < 0):
        raise ValueError("r_grid must be a strictly increasing array of radii >= 0")
    if spec.R > 0 and spec.saturated:
        tm = theta_max(spec)
        r_lo = spec.R * math.sin(tm)
        ok = r >= r_lo * (1.0 - 1e-12)
        # the family is a single arc; both branches of the general height formula
        # coincide. l_z**2 is taken as J(theta_max) so the second radicand is
        # exactly zero instead of a rounding residue under a square root.
        l2 = J(tm, spec)
        _, z = _branches(np.maximum(r[ok], r_lo), tm, spec.H, spec.R, l2, spec.g)
        ok_idx = np.flatnonzero(ok)
        good = np.isfinite(z)
        return [EnvelopeCurve("max_lz", r[ok_idx[good]], z[good], np.full(good.sum(), tm),
                              gaps=np.sort(np.concatenate([r[~ok], r[ok_idx[~good]]])))]

    curves = []
    for which in ("upper", "lower"):
        val, th, feasible = _extremize(r, spec, which, n_scan)
        ok = feasible & np.isfinite(val)
        curves.append(EnvelopeCurve(which, r[ok], val[ok], th[ok], gaps=r[~ok]))
    if spec.l_z != 0.0:
        curves.append(inner_barrier(spec, n_scan=n_scan))
    return curves


def _inner_radius(z, th, spec: DomainSpec):
    # smaller radius at which the theta arc crosses height z; nan above the vertex
    H, R, l2, g = spec.H, spec.R, spec.l_z ** 2, spec.g
    c = np.cos(th)
    s2 = np.sin(th) ** 2
    w = H - R * c
    B = np.maximum(R * R * s2 * g * w - l2, 0.0)
    with np.errstate(invalid="ignore"):
        tau = np.sqrt(2.0 * (0.5 * (H + R * c) - z) / g)
        rho2 = R * R * s2 - 2.0 * np.sqrt(B) * tau + g * w * tau * tau
        return np.sqrt(np.maximum(rho2, 0.0)) + np.where(np.isnan(tau), np.nan, 0.0)


def inner_barrier(spec: DomainSpec, n: int = 400, n_scan: int = 2048) -> EnvelopeCurve:
    """Angular-momentum barrier: the innermost radius the family reaches at
    each height, over the heights of the arcs' turning points.

    Computed directly from the family (minimizing the crossing radius over
    theta), independent of the closed-form small-``l_z`` curve.
    """
    if spec.l_z == 0.0:
        raise OutOfRange("no angular-momentum barrier for l_z = 0")
    lo, hi = admissible_theta(spec)
    th_scan = np.linspace(lo, hi, n_scan)
    turn_r = r_min(th_scan, spec)
    turn_z, _ = _branches(turn_r, th_scan, spec.H, spec.R, spec.l_z ** 2, spec.g)
    turn_z = turn_z[np.isfinite(turn_z)]
    zs = np.linspace(turn_z.min(), turn_z.max(), n)

    def objective(th, zz):
        rho = _inner_radius(zz, th, spec)
        return np.where(np.isfinite(rho), -rho, -np.inf)

    a = np.full_like(zs, lo)
    b = np.full_like(zs, hi)
    frac = np.linspace(0.0, 1.0, n_scan)
    grid = a[:, None] + (b - a)[:, None] * frac[None, :]
    vals = objective(grid, zs[:, None])
    k = np.argmax(vals, axis=1)
    idx = np.arange(len(zs))
    best_th = grid[idx, k]
    best = vals[idx, k]
    x, fx = _golden(lambda th: objective(th, zs),
                    grid[idx, np.maximum(k - 1, 0)], grid[idx, np.minimum(k + 1, n_scan - 1)])
    better = fx > best
    best_th = np.where(better, x, best_th)
    rho = -np.where(better, fx, best)
    ok = np.isfinite(rho)
    rho, zs, best_th = rho[ok], zs[ok], best_th[ok]
    order = np.argsort(rho, kind="stable")
    rho, zs, best_th = rho[order], zs[order], best_th[order]
    keep = np.concatenate([[True], np.diff(rho) > 0])
    return EnvelopeCurve("inner_barrier", rho[keep], zs[keep], best_th[keep])


# ---------------------------------------------------------------------------
# Closed-form limiting cases


def _require_small(spec: DomainSpec, allow_zero: bool):
    if spec.l_z == 0.0:
        if not allow_zero:
            raise OutOfRange("regime requires l_z != 0")
        return
    if spec.R == 0 or spec.l_z ** 2 > SMALL_LZ_FRACTION * J_max(spec):
        raise OutOfRange(
            f"small-l_z regime requires l_z**2 <= {SMALL_LZ_FRACTION} J_max"
        )


def limit_c_pm(r, spec: DomainSpec):
    """Envelopes ``(c_plus, c_minus)`` for vanishing angular momentum:
    ``(H +- R) / 2 - r**2 / (2 (H +- R))``.

    Also the leading-order envelopes for small ``l_z``.
    """
    _require_small(spec, allow_zero=True)
    r = np.asarray(r, dtype=float)
    H, R = spec.H, spec.R
    with np.errstate(divide="ignore"):
        cp = 0.5 * (H + R) - r * r / (2.0 * (H + R))
        cm = 0.5 * (H - R) - r * r / (2.0 * (H - R))
    if cp.ndim == 0:
        return float(cp), float(cm)
    return cp, cm


def c0_coefficients(spec: DomainSpec) -> tuple[float, float]:
    """Coefficients of ``r**2`` and ``r**4`` in the barrier curve."""
    if spec.l_z == 0.0:
        raise OutOfRange("barrier curve requires l_z != 0")
    l2 = spec.l_z ** 2
    return (spec.H ** 2 - spec.R ** 2) * spec.g / (2.0 * l2), spec.g / (2.0 * l2)


def limit_c0(r, spec: DomainSpec):
    """Angular-momentum barrier for small ``l_z``:
    ``g r**2 (H**2 - R**2 + r**2) / (2 l_z**2)``.

    This is the locus of the arcs' points of closest approach to the axis.
    """
    _require_small(spec, allow_zero=False)
    r = np.asarray(r, dtype=float)
    a2, a4 = c0_coefficients(spec)
    out = a2 * r ** 2 + a4 * r ** 4
    return float(out) if out.ndim == 0 else out


def limit_c_tilde(r, theta, spec: DomainSpec, delta: float | None = None):
    """Large-``l_z`` approximation to the arc heights near ``theta_max``.

    ``theta`` must lie within ``delta`` of ``theta_max``; ``delta`` defaults to
    half the width of the admissible interval.
    """
    if spec.R == 0 or spec.l_z ** 2 < LARGE_LZ_FRACTION * J_max(spec):
        raise OutOfRange(f"large-l_z regime requires l_z**2 >= {LARGE_LZ_FRACTION} J_max")
    tm = theta_max(spec)
    if delta is None:
        lo, hi = admissible_theta(spec)
        delta = 0.5 * (hi - lo)
    if abs(theta - tm) > delta + 1e-15:
        raise OutOfRange(f"theta must lie within {delta} of theta_max = {tm}")
    r = np.asarray(r, dtype=float)
    H, R = spec.H, spec.R
    c = math.cos(theta)
    out = 0.5 * (H + R * c) - (r * r - (R * math.sin(tm)) ** 2) / (2.0 * (H - R * c))
    return float(out) if out.ndim == 0 else out


def limit_d(r, spec: DomainSpec):
    """Single height function at maximal angular momentum, ``r >= R sin(theta_max)``."""
    if spec.R == 0 or not spec.saturated:
        raise OutOfRange("regime requires l_z**2 = J_max")
    tm = theta_max(spec)
    r = np.asarray(r, dtype=float)
    H, R = spec.H, spec.R
    s, c = math.sin(tm), math.cos(tm)
    if np.any(r < R * s * (1.0 - 1e-12)):
        raise OutOfRange(f"r must be >= R sin(theta_max) = {R * s}")
    out = 0.5 * (H + R * c) - (r * r - (R * s) ** 2) / (2.0 * (H - R * c))
    return float(out) if out.ndim == 0 else out


def max_lz_accessible(spec: DomainSpec) -> bool:
    """Whether the vertex of the ``theta_max`` arc lies inside the mirror,
    i.e. the maximal-``l_z`` motion is not cut off by the wall."""
    tm = theta_max(spec)
    r = spec.R * math.sin(tm)
    z = 0.5 * (spec.H + spec.R * math.cos(tm))
    return bool(z >= mirror_height(r, spec.mirror) - spec.mirror.tol_boundary)


def clip_to_mirror(curve: EnvelopeCurve, m: MirrorConfig) -> EnvelopeCurve:
    """Restrict a curve to the part lying inside (on or above) the mirror."""
    inside = curve.z >= mirror_height(curve.r, m) - m.tol_boundary
    theta = None if curve.theta is None else curve.theta[inside]
    return EnvelopeCurve(curve.label, curve.r[inside], curve.z[inside], theta,
                         gaps=np.sort(np.concatenate([curve.gaps, curve.r[~inside]])))
