"""Exception hierarchy for the billiard library."""


class BilliardError(Exception):
    """Base class for all errors raised by this package."""


class OffBoundary(BilliardError, ValueError):
    """A point expected on the mirror surface is not on it."""


class Grazing(BilliardError):
    """The flight touches the mirror tangentially; dynamics undefined."""


class NoImpact(BilliardError):
    """No forward intersection with the mirror exists (corrupted state)."""


class OutgoingVelocity(BilliardError, ValueError):
    """Reflection requested for a velocity already leaving the boundary."""


class DegenerateSphere(BilliardError, ValueError):
    """Operation needs a foci sphere of positive radius."""


class EmptyInterval(BilliardError, ValueError):
    """No polar angle satisfies J >= l_z**2."""

    def __init__(self, message, j_max=None):
        super().__init__(message)
        self.j_max = j_max


class OutOfRange(BilliardError, ValueError):
    """Argument outside the domain where a formula is defined."""


class MaxStepsExceeded(BilliardError):
    """The reference integrator did not find a crossing within its budget."""
