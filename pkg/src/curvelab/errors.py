"""Exception hierarchy shared by every curvelab layer."""


class CurveLabError(Exception):
    """Base class for all library errors."""


class InvalidElimination(CurveLabError):
    pass


class InvalidParametrization(CurveLabError):
    pass


class TruncationTooSmall(CurveLabError):
    """A computation needed more series precision than it was given."""

    def __init__(self, message, attempted=None):
        super().__init__(message)
        self.attempted = attempted


class UnsupportedCoefficientField(CurveLabError):
    """A Puiseux coefficient would leave the rationals."""


class NonReducedInput(CurveLabError):
    pass


class DegenerateInput(CurveLabError):
    """Two branches coincide, so an intersection multiplicity is infinite."""


class OutOfBox(CurveLabError):
    pass


class NotInSet(CurveLabError):
    pass


class NotASubset(CurveLabError):
    pass


class ConductorViolation(CurveLabError):
    pass


class OracleInconclusive(CurveLabError):
    pass


class ConsistencyError(CurveLabError):
    """An internal cross-check failed; indicates a bug or a wrong input claim."""


class SpecParseError(CurveLabError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column
