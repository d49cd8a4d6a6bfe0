"""Exception types raised by the engine."""


class QPeriodsError(Exception):
    """Base class for engine errors."""


class SingularHypersurface(QPeriodsError):
    """The projective hypersurface f = 0 is singular (Jacobian quotient is infinite)."""


class UnsupportedCase(QPeriodsError):
    """A case the engine deliberately refuses (e.g. a starting form with a pole at infinity)."""


class ParseError(QPeriodsError):
    """Syntax error in an expression; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class GradeError(QPeriodsError):
    """A polynomial or operator does not have the grade required by the context."""


class InhomogeneousElement(QPeriodsError):
    """A Weyl element mixes several m-hat grades where a single grade was required."""
