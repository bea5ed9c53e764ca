"""Exception hierarchy shared by all modules; the CLI maps these to exit codes."""


class QESError(Exception):
    """Base class for library errors."""


class DomainError(QESError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConstraintError(QESError, ValueError):
    """Parameters violate a model or configuration constraint."""


class NumericalError(QESError, ArithmeticError):
    """An iteration failed to converge or a numerical check broke down."""


class NondegeneracyError(NumericalError):
    """A recurrence pivot vanishes; `index` names the offending j."""

    def __init__(self, message: str, index: list[int]):
        super().__init__(message)
        self.index = index


class TrackingError(NumericalError):
    """Continuity tracking of levels lost a root."""
