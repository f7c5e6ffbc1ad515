"""Run the invariant suites, then break the reflection law on purpose.

The same entry point as ``paraboloid-billiard verify``. A reflection that
uses the wrong sign on the horizontal normal components either throws the
particle through the wall or pushes the next focus off the sphere; the
foci-sphere suite fails in both cases.
"""
import numpy as np

from paraboloid_billiard import MirrorConfig, random_interior_states
from paraboloid_billiard.cli import _sign_flipped_reflection
from paraboloid_billiard.verification import axial_drop, run_all

m = MirrorConfig()
states = random_interior_states(np.random.default_rng(3), 5, m)

print("honest reflection")
for res in run_all(states, 2000, m):
    print("  " + res.line())

print("\nfaulty reflection")
for res in run_all(states, 2000, m, reflection=_sign_flipped_reflection):
    print("  " + res.line())

print("\ndegenerate sphere (drop from the focus)")
for res in run_all([axial_drop(m)], 10, m):
    print("  " + res.line())
