"""Exception types shared across the package."""


class ScalingRequiredError(RuntimeError):
    """Center-of-mass brackets of this system do not close into a
    single-particle algebra: the deformation parameters are not inversely
    proportional to the particle masses."""


class PotentialSingularityError(RuntimeError):
    """A potential was evaluated inside its guarded singular region."""


class NonFiniteStateError(RuntimeError):
    """Integration produced a non-finite phase-space state."""

    def __init__(self, message: str, step: int | None = None, time: float | None = None):
        super().__init__(message)
        self.step = step
        self.time = time
