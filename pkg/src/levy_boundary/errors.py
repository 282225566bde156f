"""Exception hierarchy shared by all pipeline stages."""


class DragonError(Exception):
    """Base class for every error raised by this package."""


class ContractError(DragonError, ValueError):
    """A caller violated an operation precondition (e.g. mismatched levels)."""


class ResourceLimitError(DragonError):
    """A geometric computation was requested beyond the configured depth limit."""


class DivergenceError(DragonError):
    """The stable-set iteration failed to reach a fixed point."""


class ClassificationError(DragonError):
    """The structural type classification disagrees with the expected shape."""


class ClosureError(DragonError):
    """A child type fell outside the set a matrix is being built over."""


class StructureError(DragonError):
    """A matrix block that must vanish has a nonzero entry."""


class PrimitivityError(DragonError):
    """No power up to the requested bound is strictly positive."""


class ConvergenceError(DragonError):
    """The power method failed to converge (or its precondition fails)."""


class VerificationError(DragonError):
    """Geometric and symbolic computations disagree."""

    def __init__(self, message, first_difference=None):
        super().__init__(message)
        self.first_difference = first_difference
