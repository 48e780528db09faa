"""Exception hierarchy shared by every qlogic module."""


class QLogicError(Exception):
    """Base class for all errors raised by qlogic."""


class DimensionMismatch(QLogicError, ValueError):
    pass


class NotHermitian(QLogicError, ValueError):
    pass


class NotUnitary(QLogicError, ValueError):
    pass


class NotDensityMatrix(QLogicError, ValueError):
    pass


class NotProjection(QLogicError, ValueError):
    pass


class EmptyInterval(QLogicError, ValueError):
    pass


class UndefinedAtSpectrum(QLogicError, ValueError):
    pass


class NotDedekindCut(QLogicError, ValueError):
    pass


class PropositionSyntaxError(QLogicError, ValueError):
    """Malformed proposition text.

    ``position`` is a byte offset into the UTF-8 encoding of the input.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


class UnknownObservable(QLogicError, KeyError):
    def __str__(self):
        return f"unknown observable {self.args[0]!r}"


class UnknownState(QLogicError, KeyError):
    def __str__(self):
        return f"unknown state {self.args[0]!r}"


class ProbabilityOutOfRange(QLogicError, ArithmeticError):
    pass


class NotATautology(QLogicError, ValueError):
    pass


class NotJointlyDeterminate(QLogicError, ValueError):
    pass


class MalformedPovm(QLogicError, ValueError):
    pass


class ModelFileError(QLogicError, ValueError):
    pass
