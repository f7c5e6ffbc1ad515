"""Invariant suites run by ``paraboloid-billiard verify``.

Each suite returns a :class:`SuiteResult`; nothing raises on a failed check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import domains
from .dynamics import ParticleState, conserved, impact_time, fly, simulate
from .geometry import MirrorConfig, boundary_value
from .oracle import OracleConfig, oracle_step

__all__ = [
    "SuiteResult",
    "foci_sphere_suite",
    "conservation_suite",
    "oracle_suite",
    "containment_suite",
    "envelope_containment",
    "run_all",
]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _runs(states, n_bounces, m, reflection=None):
    return [(s, simulate(s, n_bounces, m, reflection=reflection)) for s in states]


def foci_sphere_suite(states, n_bounces, m: MirrorConfig, reflection=None, tol=1e-9,
                      runs=None) -> SuiteResult:
    """Every arc's focus at distance ``R`` from the mirror focus."""
    runs = runs if runs is not None else _runs(states, n_bounces, m, reflection)
    worst = 0.0
    termination = None
    for s0, traj in runs:
        termination = termination or traj.termination
        R = conserved(s0, m).R
        scale = max(R, m.f_M)
        for foci in (traj.foci(), traj.incoming_foci()):
            dev = np.abs(np.linalg.norm(foci, axis=1) - R) / scale
            worst = max(worst, float(dev.max(initial=0.0)))
    detail = f"max |‖F‖-R|/max(R,f_M) = {worst:.3e} (tol {tol:g})"
    if termination:
        detail += f"; run terminated: {termination}"
    return SuiteResult("foci-sphere", worst < tol and termination is None, detail)


def conservation_suite(states, n_bounces, m: MirrorConfig, reflection=None, tol=1e-9,
                       runs=None) -> SuiteResult:
    """Drift of ``H`` (relative) and ``l_z`` (absolute) across all arcs."""
    runs = runs if runs is not None else _runs(states, n_bounces, m, reflection)
    worst_h = worst_l = 0.0
    for s0, traj in runs:
        if not traj.completed:
            return SuiteResult("conservation", False, f"run terminated: {traj.termination}")
        c0 = conserved(s0, m)
        dh = np.abs(traj.directrix_heights() - c0.H) / max(abs(c0.H), m.f_M)
        dl = np.abs(traj.angular_momenta() - c0.l_z)
        worst_h = max(worst_h, float(dh.max(initial=0.0)))
        worst_l = max(worst_l, float(dl.max(initial=0.0)))
    ok = worst_h < tol and worst_l < tol
    return SuiteResult("conservation", ok, f"max drift H {worst_h:.3e}, l_z {worst_l:.3e} (tol {tol:g})")


def oracle_suite(states, m: MirrorConfig, cfg: OracleConfig | None = None, tol=1e-6) -> SuiteResult:
    """Closed-form impacts against the brute-force integrator."""
    worst = 0.0
    for s in states:
        t = impact_time(s, m)
        p = fly(s, t, m).pos
        ref = oracle_step(s, m, cfg)
        worst = max(worst, float(np.linalg.norm(p - ref.point)))
    return SuiteResult("oracle-equivalence", worst < tol, f"max impact offset {worst:.3e} (tol {tol:g})")


def _touching_values(r, spec, which, lo_th, hi_th):
    # refine the envelope at each r inside the theta bracket [lo_th, hi_th]
    H, R, l2, g = spec.H, spec.R, spec.l_z ** 2, spec.g
    sign = 1.0 if which == "upper" else -1.0

    def objective(th):
        hp, hm = domains._branches(r, th, H, R, l2, g)
        val = sign * (hm if which == "upper" else hp)
        return np.where(np.isfinite(val), val, -np.inf)

    x, fx = domains._golden(objective, lo_th, hi_th)
    return sign * np.maximum(fx, np.maximum(objective(lo_th), objective(hi_th)))


def envelope_containment(points: np.ndarray, spec: domains.DomainSpec, n_grid: int = 1000,
                         n_scan: int = 256, margin: float = 1e-4) -> dict:
    """Largest excursion of ``points`` (shape ``(..., 3)``) beyond the upper
    and lower envelopes and the mirror wall.

    The envelopes are evaluated on a radial grid; points that come within
    ``margin`` plus the local interpolation error of the interpolated curve
    are re-checked against an envelope value refined at their own radius.
    Only points where the lower envelope lies above the wall are checked
    against it.
    """
    m = spec.mirror
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    r = np.hypot(pts[:, 0], pts[:, 1])
    z = pts[:, 2]
    out = {
        "mirror": float(max(0.0, -boundary_value(pts, m).min(initial=np.inf))),
        "directrix": float(max(0.0, (z - spec.H).max(initial=-np.inf))),
    }
    if spec.R == 0:
        up = 0.5 * spec.H - r * r / (2.0 * spec.H) if spec.H > 0 else np.where(r == 0, 0.0, -np.inf)
        out["upper"] = float(max(0.0, (z - up).max(initial=-np.inf)))
        out["lower"] = 0.0
        return out
    lo_adm, hi_adm = domains.admissible_theta(spec)
    step = (hi_adm - lo_adm) / n_scan
    grid = np.linspace(max(r.min() * (1 - 1e-9), 0.0), r.max() * (1 + 1e-9) + 1e-12, n_grid)
    for which in ("upper", "lower"):
        val, th, feasible = domains._extremize(grid, spec, which, n_scan)
        ok = feasible & np.isfinite(val)
        g_r, g_v, g_th = grid[ok], val[ok], th[ok]
        if g_r.size < 3:
            out[which] = 0.0 if which == "lower" else math.inf
            continue
        curv = np.zeros_like(g_v)
        curv[1:-1] = np.abs(g_v[2:] - 2 * g_v[1:-1] + g_v[:-2])
        curv[0], curv[-1] = curv[1], curv[-2]
        env = np.interp(r, g_r, g_v)
        slack = margin + np.interp(r, g_r, curv)
        if which == "upper":
            excess = z - env
        else:
            excess = np.where(env > domains.mirror_height(r, m), env - z, -np.inf)
        cand = np.flatnonzero(excess > -slack)
        worst = 0.0
        if cand.size:
            rc = r[cand]
            k = np.clip(np.searchsorted(g_r, rc), 1, g_r.size - 1)
            th_l, th_r = g_th[k - 1], g_th[k]
            bracket_lo = np.maximum(np.minimum(th_l, th_r) - 2 * step, lo_adm)
            bracket_lo = np.maximum(bracket_lo, domains._feasible_lower_theta(rc, spec, lo_adm))
            bracket_hi = np.minimum(np.maximum(th_l, th_r) + 2 * step, hi_adm)
            refined = _touching_values(rc, spec, which, bracket_lo, bracket_hi)
            exc = z[cand] - refined if which == "upper" else refined - z[cand]
            worst = float(max(0.0, np.nanmax(exc)))
        out[which] = worst
    return out


def containment_suite(states, n_bounces, m: MirrorConfig, points_per_segment=8, tol=1e-6,
                      runs=None, reflection=None) -> SuiteResult:
    """Sampled trajectory points stay inside the mirror and envelopes."""
    runs = runs if runs is not None else _runs(states, n_bounces, m, reflection)
    worst = {"mirror": 0.0, "directrix": 0.0, "upper": 0.0, "lower": 0.0}
    for s0, traj in runs:
        if not traj.completed:
            return SuiteResult("envelope-containment", False, f"run terminated: {traj.termination}")
        spec = domains.DomainSpec.from_state(s0, m)
        res = envelope_containment(traj.sample(points_per_segment), spec)
        for k, v in res.items():
            worst[k] = max(worst[k], v)
    ok = all(v < tol for v in worst.values())
    detail = ", ".join(f"{k} {v:.3e}" for k, v in worst.items())
    return SuiteResult("envelope-containment", ok, f"max excursion {detail} (tol {tol:g})")


def run_all(states, n_bounces, m: MirrorConfig, n_oracle: int | None = None, reflection=None,
            containment_bounces: int | None = None) -> list[SuiteResult]:
    runs = _runs(states, n_bounces, m, reflection)
    results = [
        foci_sphere_suite(states, n_bounces, m, runs=runs),
        conservation_suite(states, n_bounces, m, runs=runs),
    ]
    n_oracle = len(states) if n_oracle is None else n_oracle
    results.append(oracle_suite(states[:n_oracle], m))
    if containment_bounces is not None:
        runs = _runs(states, containment_bounces, m, reflection)
    results.append(containment_suite(states, n_bounces, m, runs=runs))
    return results


def axial_drop(m: MirrorConfig) -> ParticleState:
    """Particle released at rest at the mirror focus: ``H = R = l_z = 0``."""
    return ParticleState([0.0, 0.0, 0.0], [0.0, 0.0, 0.0])


def max_relative_drift(traj, s0, m: MirrorConfig) -> dict:
    """Largest deviation of ``(H, l_z, R)`` from their launch values."""
    c0 = conserved(s0, m)
    if len(traj) == 0:
        return {"H": 0.0, "l_z": 0.0, "R": 0.0}
    dh = np.abs(traj.directrix_heights() - c0.H).max() / max(abs(c0.H), m.f_M)
    dl = np.abs(traj.angular_momenta() - c0.l_z).max() / max(abs(c0.l_z), m.speed_scale * m.f_M)
    dr = np.abs(np.linalg.norm(traj.foci(), axis=1) - c0.R).max() / max(c0.R, m.f_M)
    return {"H": float(dh), "l_z": float(dl), "R": float(dr)}


def closure_error(traj, q: int) -> float:
    """Distance between the launch point and the ``q``-th impact."""
    if len(traj) < q or q <= 0:
        return math.inf
    return float(np.linalg.norm(traj.end_pos[q - 1] - traj.start_pos[0]))
