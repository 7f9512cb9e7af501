"""Exception hierarchy shared by every module of the package."""


class LoewnerLabError(Exception):
    """Base class for all errors raised by loewner_lab."""


class DimensionError(LoewnerLabError, ValueError):
    """Operands have incompatible or empty shapes."""


class NotHermitianError(LoewnerLabError, ValueError):
    """A matrix deviates from its adjoint by more than the allowed defect."""


class NotPositiveError(LoewnerLabError, ValueError):
    """A strict-positivity (or positivity) precondition failed."""


class ConvergenceError(LoewnerLabError, ArithmeticError):
    """An iterative eigensolver hit its iteration cap.

    The off-diagonal residual at the time of failure is kept in ``residual``.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotIsometryError(LoewnerLabError, ValueError):
    """``C^* C`` differs from the identity."""


class NotUnitalError(LoewnerLabError, ValueError):
    """A map (or a family of maps) does not send the identity to the identity."""


class ProvisoError(LoewnerLabError, ValueError):
    """An operator that must be invertible for a bound to make sense is singular.

    Kept distinct from a failed inequality so that sweeps never count it as a
    counterexample.
    """


class ParseError(LoewnerLabError, ValueError):
    """A textual specification could not be parsed.

    ``position`` is the 0-based character offset of the problem, if known.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
