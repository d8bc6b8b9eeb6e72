"""Exception hierarchy shared by all lamstab modules."""


class LaminationError(ValueError):
    """Base class for every error raised by lamstab."""


class NonPositive(LaminationError):
    pass


class TraceMismatch(LaminationError):
    pass


class NotPositive(LaminationError):
    pass


class DegenerateDenominator(LaminationError):
    pass


class DegenerateLambda(LaminationError):
    pass


class DegenerateXi1(LaminationError):
    pass


class NotDistinct(LaminationError):
    pass


class NotAdmissible(LaminationError):
    pass


class EmptyAdmissibleSet(LaminationError):
    pass


class Unsupported(LaminationError):
    pass


class ReconstructionMismatch(LaminationError):
    pass


class NoRealRoots(LaminationError):
    pass


class BracketViolation(LaminationError):
    pass


class OptimalityViolation(LaminationError):
    pass


class OrderingViolation(LaminationError):
    pass


class StitchFailure(LaminationError):
    pass


class MismatchWithAdmissibleSet(LaminationError):
    pass


class ExtremalityViolation(LaminationError):
    pass


class StrictnessViolation(LaminationError):
    pass


class ConfigError(LaminationError):
    pass
