"""Exception hierarchy shared by all modules.

Errors fall into two families that the command line maps to distinct exit
codes: precondition failures (bad input, unsupported configuration) and
precision failures (the truncation window cannot certify the answer).
"""


class ArtifactError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(ArtifactError, ValueError):
    """An operation was called outside its domain."""


class PrecisionError(ArtifactError, ArithmeticError):
    """The available precision does not determine the requested value."""


# cones
class DimensionTooLarge(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class IncompatibleCones(PreconditionError):
    pass


# charp
class WindowMismatch(PreconditionError):
    pass


class PrecisionExhausted(PrecisionError):
    pass


class InsufficientPadicPrecision(PrecisionError):
    pass


# wittperiod
class LengthMismatch(PreconditionError):
    pass


class UnsupportedCoefficientField(PreconditionError):
    pass


class NonIntegralExponent(PreconditionError):
    pass


class RadiusTooLarge(PreconditionError):
    pass


class NotAUnit(PreconditionError):
    pass


# gamma
class PrecisionMismatch(PreconditionError):
    pass


class NotInConvergenceDomain(PreconditionError):
    pass


# phimod
class IncompatiblePower(PreconditionError):
    pass


class ValuationUnknown(PrecisionError):
    pass


class SearchCapExceeded(ArtifactError):
    pass


class NonCommutingOperators(PreconditionError):
    pass


class SaturationDiverged(ArtifactError):
    pass


# descent
class DominanceFailure(PreconditionError):
    pass


class NonConvergence(ArtifactError):
    pass


class CommutationFailure(PreconditionError):
    pass
