"""Orbits that hit the mirror only on one horizontal circle.

The launch velocity is fixed by the step angle theta between consecutive
impacts. Rational theta / 2 pi closes after finitely many bounces; other
angles fill the circle densely while every arc stays on one surface of
revolution.
"""
import math

import numpy as np

from paraboloid_billiard import (
    CircleOrbitSpec,
    MirrorConfig,
    circle_velocities,
    classify_orbit,
    flight_surface,
    flight_surface_interval,
    initial_state,
    simulate,
)

m = MirrorConfig()

for theta in (math.pi, 2 * math.pi / 3, 2 * math.pi * 2 / 5, 2.0):
    spec = CircleOrbitSpec(r0=2.0, theta=theta)
    v = circle_velocities(spec, m)
    kind = classify_orbit(theta)
    print(f"theta = {theta:.6f}: (v_r, v_phi, v_z) = {np.round(v, 6)}, {kind}")

spec = CircleOrbitSpec(2.0, 2 * math.pi / 3)
traj = simulate(initial_state(spec, m), 6, m)
print("\nimpacts of the 3-periodic orbit:\n", np.round(traj.end_pos, 12))

spec = CircleOrbitSpec(2.0, 2.0)
traj = simulate(initial_state(spec, m), 1000, m)
pts = traj.sample(20).reshape(-1, 3)
lo, hi = flight_surface_interval(spec)
r = np.clip(np.hypot(pts[:, 0], pts[:, 1]), lo, hi)
print("\nnon-periodic orbit, 1000 bounces")
print("  impact radius spread", np.ptp(np.hypot(traj.end_pos[:, 0], traj.end_pos[:, 1])))
print("  worst distance of sampled points from the flight surface",
      np.abs(pts[:, 2] - flight_surface(r, spec, m)).max())
