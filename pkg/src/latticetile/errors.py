"""Exception hierarchy shared by every module."""


class LatticeTileError(ValueError):
    """Base class; the CLI maps subclasses onto exit codes."""


class MalformedInputError(LatticeTileError):
    pass


class PreconditionError(LatticeTileError):
    """A mathematical precondition of an operation does not hold."""


class NonSquareError(PreconditionError):
    pass


class SingularError(PreconditionError):
    pass


class DimensionMismatchError(PreconditionError):
    pass


class NotSublatticeError(PreconditionError):
    pass


class NonIntegralIndexError(LatticeTileError):
    """Internal consistency failure: vol(H)/vol(L) is not an integer."""


class VolumeMismatchError(PreconditionError):
    pass


class FlavorMismatchError(PreconditionError):
    pass


class NotBoundedError(PreconditionError):
    pass


class DetNotOneError(PreconditionError):
    pass


class CapExceededError(PreconditionError):
    pass


WindowTooLargeError = CapExceededError


class InfeasibleError(LatticeTileError):
    pass


class OverlapDetectedError(LatticeTileError):
    pass


class DimensionUnsupportedError(PreconditionError):
    pass
