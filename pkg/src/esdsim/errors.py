"""Exception hierarchy shared by all modules."""


class EsdError(Exception):
    """Base class for every error raised by esdsim."""


class DimensionMismatch(EsdError, ValueError):
    pass


class NonSquare(EsdError, ValueError):
    pass


class ConvergenceFailure(EsdError, ArithmeticError):
    pass


class InvalidState(EsdError, ValueError):
    """A matrix failed the density-matrix checks (Hermitian, unit trace, PSD)."""


class InvalidNormalization(EsdError, ValueError):
    pass


class InvalidParams(EsdError, ValueError):
    pass


class NotXForm(EsdError, ValueError):
    """The state has left the symmetric X-shaped family."""


class StepTooLarge(EsdError, ArithmeticError):
    pass


class NotEntangledInitially(EsdError, ValueError):
    pass


class NonUnitaryCompletion(EsdError, ArithmeticError):
    pass


class SingularSystem(EsdError, ArithmeticError):
    pass


class PreparationLeak(EsdError, ArithmeticError):
    pass
