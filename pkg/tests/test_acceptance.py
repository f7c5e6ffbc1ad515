"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or
``python3 tests/test_acceptance.py`` for the report alone.
"""
import math
import time

import numpy as np
import pytest

from paraboloid_billiard import (
    CircleOrbitSpec,
    DomainSpec,
    J,
    J_max,
    MirrorConfig,
    NonPeriodic,
    Periodic,
    c0_coefficients,
    circle_velocities,
    classify_orbit,
    conserved,
    envelope,
    flight_surface,
    flight_surface_interval,
    fly,
    impact_time,
    initial_state,
    inner_barrier,
    limit_c0,
    limit_c_pm,
    limit_d,
    oracle_step,
    random_interior_states,
    simulate,
    theta_max,
)
from paraboloid_billiard.cli import main as cli_main
from paraboloid_billiard.verification import envelope_containment

M = MirrorConfig()
SEED = 1234


def report(number, title, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}", flush=True)
    assert ok, detail


@pytest.fixture(scope="module")
def long_runs():
    states = random_interior_states(np.random.default_rng(SEED), 50, M)
    t0 = time.perf_counter()
    runs = [(s, simulate(s, 10 ** 4, M)) for s in states]
    return runs, time.perf_counter() - t0


def test_criterion_01_foci_sphere(long_runs):
    runs, elapsed = long_runs
    worst, complete = 0.0, True
    for s0, traj in runs:
        complete &= traj.completed and len(traj) == 10 ** 4
        R = conserved(s0, M).R
        for foci in (traj.foci(), traj.incoming_foci()):
            dev = np.abs(np.linalg.norm(foci, axis=1) - R) / max(R, M.f_M)
            worst = max(worst, dev.max())
    ok = complete and worst < 1e-9 and elapsed < 10.0
    report(1, "foci-sphere invariance", ok,
           f"50 x 1e4 bounces, max deviation {worst:.2e} (< 1e-9), simulation {elapsed:.2f} s (< 10 s)")


def test_criterion_02_conservation(long_runs):
    runs, _ = long_runs
    dh = dl = 0.0
    for s0, traj in runs:
        c0 = conserved(s0, M)
        dh = max(dh, np.abs(traj.directrix_heights() - c0.H).max() / max(abs(c0.H), M.f_M))
        dl = max(dl, np.abs(traj.angular_momenta() - c0.l_z).max())
    report(2, "conservation", dh < 1e-9 and dl < 1e-9,
           f"relative H drift {dh:.2e}, absolute l_z drift {dl:.2e} (< 1e-9)")


def test_criterion_03_oracle_equivalence():
    states = random_interior_states(np.random.default_rng(SEED + 1), 100, M)
    t0 = time.perf_counter()
    worst = 0.0
    for s in states:
        closed = fly(s, impact_time(s, M), M).pos
        worst = max(worst, np.linalg.norm(closed - oracle_step(s, M).point))
    elapsed = time.perf_counter() - t0
    report(3, "oracle equivalence", worst < 1e-6 and elapsed < 30.0,
           f"100 flights, max offset {worst:.2e} (< 1e-6), {elapsed:.2f} s (< 30 s)")


def test_criterion_04_circle_orbits():
    spec3 = CircleOrbitSpec(2.0, 2 * math.pi / 3)
    s3 = initial_state(spec3, M)
    t3 = simulate(s3, 3, M)
    first_return = [np.linalg.norm(p - s3.pos) for p in t3.end_pos]
    closure = first_return[2]
    exact_three = closure < 1e-9 and min(first_return[:2]) > 1e-3
    exact_three &= classify_orbit(spec3.theta) == Periodic(3)

    spec2 = CircleOrbitSpec(2.0, math.pi)
    v_phi = circle_velocities(spec2, M)[1]
    t2 = simulate(initial_state(spec2, M), 4, M)
    planar = v_phi == 0.0 and np.abs(t2.start_vel[:, 1]).max() == 0.0 and np.abs(t2.end_pos[:, 1]).max() == 0.0
    back2 = np.linalg.norm(t2.end_pos[1] - t2.start_pos[0])
    two = planar and back2 < 1e-9 and classify_orbit(math.pi) == Periodic(2)

    specn = CircleOrbitSpec(2.0, 2.0)
    tn = simulate(initial_state(specn, M), 1000, M)
    radii = np.hypot(tn.end_pos[:, 0], tn.end_pos[:, 1])
    circ = np.abs(radii - specn.r0).max() / specn.r0
    height = np.abs(tn.end_pos[:, 2] - specn.z0(M)).max()
    pts = tn.sample(16).reshape(-1, 3)
    lo, hi = flight_surface_interval(specn)
    r = np.clip(np.hypot(pts[:, 0], pts[:, 1]), lo, hi)
    surf = np.abs(pts[:, 2] - flight_surface(r, specn, M)).max()
    nonper = tn.completed and circ < 1e-9 and height < 1e-9 and surf < 1e-9
    nonper &= classify_orbit(2.0) == NonPeriodic()

    report(4, "circle orbits", exact_three and two and nonper,
           f"3-periodic closure {closure:.2e}; 2-periodic planar={planar} return {back2:.2e}; "
           f"theta=2 over 1000 bounces: radius {circ:.2e}, height {height:.2e}, surface {surf:.2e} (< 1e-9)")


def test_criterion_05_zero_lz_envelopes():
    spec = DomainSpec(2.0, 1.0, 0.0, M)
    r = np.linspace(0.0, 3.0, 601)
    curves = {c.label: c for c in envelope(spec, r)}
    cp, cm = limit_c_pm(r, spec)
    full = len(curves["upper"].r) == len(r) == len(curves["lower"].r)
    du = np.abs(curves["upper"].z - cp).max()
    dl = np.abs(curves["lower"].z - cm).max()
    report(5, "zero-l_z envelopes", full and du < 1e-6 and dl < 1e-6,
           f"H=2 R=1 on [0, 3]: |upper - c_plus| {du:.2e}, |lower - c_minus| {dl:.2e} (< 1e-6)")


def test_criterion_06_max_lz_collapse():
    # maximal l_z from the closed form; the domain then holds one arc
    spec = DomainSpec(2.0, 1.0, math.sqrt(J_max(DomainSpec(2.0, 1.0, 0.0, M))), M)
    r = np.linspace(0.0, 4.0, 401)
    curves = envelope(spec, r)
    single = len(curves) == 1
    dd = np.abs(curves[0].z - limit_d(curves[0].r, spec)).max()
    # phase-space route: circle-orbit data are saturated and sweep the flight surface
    worst_fs, saturated = 0.0, True
    for r0, theta in [(2.0, 2 * math.pi / 3), (2.0, 2.0), (3.0, 1.0)]:
        cs = CircleOrbitSpec(r0, theta)
        dom = DomainSpec.from_state(initial_state(cs, M), M)
        saturated &= dom.saturated and dom.R < dom.H
        lo, hi = flight_surface_interval(cs)
        rr = np.linspace(lo, hi, 200)
        (curve,) = envelope(dom, rr)
        worst_fs = max(worst_fs, np.abs(curve.z - flight_surface(curve.r, cs, M)).max())
    ok = single and dd < 1e-6 and saturated and worst_fs < 1e-9
    report(6, "maximal-l_z collapse", ok,
           f"single curve={single}, |envelope - d| {dd:.2e} (< 1e-6); "
           f"|envelope - flight surface| {worst_fs:.2e} (< 1e-9) for three R < H circle orbits")


def _golden_max(fun, a, b, iters=100):
    invphi = (math.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def test_criterion_07_theta_max():
    rng = np.random.default_rng(SEED + 7)
    grid = np.linspace(0.0, math.pi, 4097)
    worst_angle = worst_value = 0.0
    count = 0
    while count < 1000:
        H, R = rng.uniform(-0.9, 5.0), rng.uniform(0.01, 5.0)
        if H < -R:
            continue
        spec = DomainSpec(H, R, 0.0, M)
        k = int(np.argmax(J(grid, spec)))
        th = _golden_max(lambda t: J(t, spec), grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)])
        worst_angle = max(worst_angle, abs(th - theta_max(spec)))
        jm = J_max(spec)
        worst_value = max(worst_value, abs(J(th, spec) - jm) / max(jm, 1e-300))
        count += 1
    ok = worst_angle < 1e-6 and worst_value < 1e-9
    report(7, "theta_max consistency", ok,
           f"1000 random (H, R): angle {worst_angle:.2e} (< 1e-6), relative J_max {worst_value:.2e} (< 1e-9)")


def test_criterion_08_containment(long_runs):
    runs, _ = long_runs
    worst = {"mirror": 0.0, "directrix": 0.0, "upper": 0.0, "lower": 0.0}
    for s0, traj in runs:
        res = envelope_containment(traj.sample(8), DomainSpec.from_state(s0, M))
        worst = {k: max(worst[k], res[k]) for k in worst}
    ok = worst["mirror"] < 1e-6 and worst["upper"] < 1e-6 and worst["directrix"] < 1e-6
    report(8, "containment", ok,
           "max excursion " + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + " (< 1e-6)")


def test_criterion_09_small_lz_barrier():
    base = DomainSpec(2.0, 1.0, 0.0, M)
    spec = DomainSpec(2.0, 1.0, 1e-3 * math.sqrt(J_max(base)), M)
    barrier = inner_barrier(spec)
    c0 = limit_c0(barrier.r, spec)
    regime = (c0 <= spec.H) & (c0 > 0)
    rel = np.abs(barrier.z[regime] - c0[regime]) / c0[regime]
    worst = rel.max() if regime.any() else math.inf
    signs = [float(np.sign(c0_coefficients(DomainSpec(1.0, R, 1e-3, M))[0])) for R in (0.999999, 1.0, 1.000001)]
    ok = regime.sum() > 50 and worst < 0.05 and signs == [1.0, 0.0, -1.0]
    report(9, "small-l_z barrier", ok,
           f"{regime.sum()} barrier points with c0 <= H, max relative gap {worst:.2e} (< 5%); "
           f"r^2 coefficient signs around R = H: {signs}")


def test_criterion_10_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    codes = [cli_main(["simulate", "--seed", "42", "--n-bounces", "500", "--out", str(p)]) for p in (a, b)]
    same = a.read_bytes() == b.read_bytes()
    report(10, "determinism", codes == [0, 0] and same,
           f"two seeded runs, {len(a.read_bytes())} bytes, byte-identical={same}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
