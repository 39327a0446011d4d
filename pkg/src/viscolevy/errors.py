"""Exception hierarchy shared by all modules."""


class ViscoLevyError(Exception):
    """Base class for every error raised by the package."""


class InvalidParameterError(ViscoLevyError, ValueError):
    """A constructor or operation received parameters outside its domain."""


class ZeroMaterialError(InvalidParameterError):
    """The impulse response is identically zero (no conjugate exists)."""


class UnsupportedRepresentationError(ViscoLevyError, TypeError):
    """The operation has no exact path for this kind of material."""


class StructuralError(ViscoLevyError, ArithmeticError):
    """A root bracket without sign change: the input is not a valid Stieltjes function."""


class InversionDivergenceError(ViscoLevyError, ArithmeticError):
    """Talbot and Gaver-Stehfest inversions disagree beyond tolerance."""


class SingularPencilError(ViscoLevyError, ArithmeticError):
    """A pencil or Laplace-domain matrix is singular where it must be invertible."""


class DegeneratePencilError(SingularPencilError):
    """B is not positive definite; use the deflation path."""


class StepSizeError(ViscoLevyError, ValueError):
    """The time step cannot resolve the stiffness of the system."""


class GridMismatchError(ViscoLevyError, ValueError):
    """Sampled inputs do not live on the same uniform grid."""


class MissingJumpRecordError(ViscoLevyError, ValueError):
    """A path was supplied without the jump records the estimator needs."""
