"""Exception hierarchy shared by every layer of the interpreter."""

from __future__ import annotations


class LPSError(Exception):
    """Base error. ``line``/``col`` are set when the error has a source location."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def located(self, filename: str = "<input>") -> str:
        if self.line is None:
            return f"{filename}: {self.message}"
        return f"{filename}:{self.line}:{self.col}: {self.message}"


class LPSSyntaxError(LPSError):
    pass


class KindViolation(LPSError):
    pass


class TimeArgViolation(LPSError):
    pass


class UnknownEventPredicate(LPSError):
    pass


class UnfoldDepthExceeded(LPSError):
    pass


class UndeclaredSort(LPSError):
    pass


class PreconditionViolation(LPSError):
    pass


class NotStratified(LPSError):
    def __init__(self, message: str, clause=None):
        super().__init__(message)
        self.clause = clause


class NotWeaklyStratified(LPSError):
    def __init__(self, stratum: int, clause):
        super().__init__(f"stratum {stratum}: reduct is not Horn within its stratum: {clause}")
        self.stratum = stratum
        self.clause = clause


class InconsistentExternalEvents(LPSError):
    pass


class ScriptedChoiceError(LPSError):
    pass


class VocabularyMismatch(LPSError):
    pass
