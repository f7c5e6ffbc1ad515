"""Gravitational billiards inside a paraboloid mirror.

Exact event-driven bounce map, conserved quantities (directrix height,
axial angular momentum, foci-sphere radius), circle orbits and
confined-domain envelopes.
"""
from .circle import *  # noqa: F401,F403
from .domains import *  # noqa: F401,F403
from .dynamics import *  # noqa: F401,F403
from .exceptions import *  # noqa: F401,F403
from .geometry import *  # noqa: F401,F403
from .oracle import *  # noqa: F401,F403

__version__ = "0.1.0"
