"""Exception hierarchy shared by all modules.

Every error raised by the numerical code derives from `NumericalError`; the CLI
maps those to exit status 2.  Bad parameters raise `PreconditionError`, which is
also a `ValueError`.
"""


class NumericalError(Exception):
    """Base class for all library errors."""


class PreconditionError(NumericalError, ValueError):
    """An input violated a documented precondition."""


class DomainError(PreconditionError):
    """Evaluation point outside the function's domain (e.g. xi = 0)."""


class CutProximityError(NumericalError):
    """Evaluation point lies on, or too close to, a branch cut."""


class AccuracyError(NumericalError):
    """Adaptive refinement hit its cap before reaching the requested accuracy."""


class TruncationError(NumericalError):
    """Finite-section size exceeds the allowed cap."""


class DivergenceError(NumericalError):
    """A series does not appear to converge."""


class SingularityError(NumericalError):
    """Integrand evaluated too close to a pole."""


class PoleError(PreconditionError):
    """Gamma-function argument at a pole."""

    def __init__(self, argument, where=""):
        self.argument = argument
        super().__init__(f"Gamma pole at argument {argument!r}{where}")


class GeometryError(NumericalError):
    """Contour placement would leave the analyticity region."""


class SizeError(PreconditionError):
    """Enumeration problem too large."""
