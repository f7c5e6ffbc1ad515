"""Bounce a particle around the bowl and watch what stays fixed.

Every flight between two reflections is a parabola with its own focus.
The foci move from bounce to bounce, but they never leave one sphere
centred on the mirror focus. Energy and the angular momentum about the
symmetry axis are conserved too.
"""
import numpy as np

from paraboloid_billiard import MirrorConfig, ParticleState, conserved, random_interior_states, simulate, step

m = MirrorConfig(f_M=1.0, g=1.0)

# One bounce by hand: launch from the wall at (2, 0, 0).
seg = step(ParticleState([2.0, 0.0, 0.0], [-1.0, 0.0, 1.0]), m)
print("impact after", round(seg.impact_time, 6), "at", np.round(seg.end.pos, 6))
print("focus of that arc", np.round(seg.focus, 6), "focal length", round(seg.focal_length, 6))

s0 = random_interior_states(np.random.default_rng(1), 1, m)[0]
c = conserved(s0, m)
print(f"\nlaunch: H = {c.H:.6f}, l_z = {c.l_z:.6f}, R = {c.R:.6f}")

traj = simulate(s0, 10_000, m)
dist = np.linalg.norm(traj.foci(), axis=1)
print(f"{len(traj)} bounces, foci distance from the mirror focus in [{dist.min():.15f}, {dist.max():.15f}]")
print("largest H drift   ", np.abs(traj.directrix_heights() - c.H).max())
print("largest l_z drift ", np.abs(traj.angular_momenta() - c.l_z).max())
print("first five foci:\n", np.round(traj.foci()[:5], 6))
