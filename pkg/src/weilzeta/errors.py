"""Exception hierarchy shared by all modules."""


class WeilZetaError(Exception):
    """Base class for every error raised by this package."""


class NonCoprimeTwist(WeilZetaError):
    pass


class DegenerateLattice(WeilZetaError):
    pass


class OddRank(WeilZetaError):
    pass


class OddDiagonal(WeilZetaError):
    pass


class OrderTooLarge(WeilZetaError):
    pass


class NonUnimodular(WeilZetaError):
    pass


# both spellings occur in the operation contracts
NotUnimodular = NonUnimodular


class WeightParityViolation(WeilZetaError):
    pass


class ConvergenceRegionViolation(UserWarning):
    """Warning: parameters lie outside the region of absolute convergence."""


class PoleProximity(WeilZetaError):
    pass


class TruncationTooCoarse(WeilZetaError):
    pass


class NotAnEigenform(WeilZetaError):
    pass


class QuadratureUnstable(WeilZetaError):
    pass


class ZeroGaussSum(WeilZetaError):
    pass


class InvalidPartition(WeilZetaError):
    pass


class UnsupportedRank(WeilZetaError):
    pass


class GammaPole(WeilZetaError):
    pass


class TruncationUnstable(WeilZetaError):
    pass


class DivergenceSuspected(WeilZetaError):
    pass


class WordSyntaxError(WeilZetaError):
    pass


class FormatError(WeilZetaError):
    pass
