"""Where a trajectory can go: envelopes of the allowed arc family.

Fixing (H, R, l_z) fixes which arcs are possible. Their envelope bounds
the region in the (r, z) half-plane. For l_z = 0 the bounds are two
parabolas; at the largest admissible l_z the family shrinks to one arc;
small l_z opens an angular-momentum hole around the axis.
"""
import math

import numpy as np

from paraboloid_billiard import (
    DomainSpec,
    J_max,
    MirrorConfig,
    admissible_theta,
    envelope,
    inner_barrier,
    limit_c0,
    limit_c_pm,
    limit_d,
    theta_max,
)

m = MirrorConfig()
r = np.linspace(0.0, 3.0, 7)

zero = DomainSpec(H=2.0, R=1.0, l_z=0.0, mirror=m)
upper, lower = envelope(zero, r)
cp, cm = limit_c_pm(r, zero)
print("l_z = 0")
print("  r      upper      c_plus     lower      c_minus")
for row in zip(r, upper.z, cp, lower.z, cm):
    print("  " + "  ".join(f"{v:9.6f}" for v in row))

jm = J_max(zero)
print(f"\nJ_max = {jm:.12f}, theta_max = {theta_max(zero):.12f}")

top = DomainSpec(2.0, 1.0, math.sqrt(jm), m)
(only,) = envelope(top, r)
print("at l_z**2 = J_max the family is", admissible_theta(top), "-> one curve")
print("  max |envelope - d(r)| =", np.abs(only.z - limit_d(only.r, top)).max())

small = DomainSpec(2.0, 1.0, 1e-3 * math.sqrt(jm), m)
barrier = inner_barrier(small)
c0 = limit_c0(barrier.r, small)
keep = (c0 > 0) & (c0 <= small.H)
print(f"\nsmall l_z: barrier radius ranges over [{barrier.r.min():.2e}, {barrier.r.max():.2e}]")
print("  worst relative gap to the closed-form barrier",
      (np.abs(barrier.z - c0)[keep] / c0[keep]).max())
