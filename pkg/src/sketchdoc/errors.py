"""Exception hierarchy shared by every engine module.

Each error carries a stable machine-readable ``code`` so the HTTP facade
and CLI can map failures without string matching.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class; ``code`` defaults to the class name."""

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__

    @property
    def code(self) -> str:
        return self.__class__.__name__


# -- dataset ---------------------------------------------------------------

class AllMissing(EngineError):
    pass


class EmptyInput(EngineError):
    pass


class RaggedRecords(EngineError):
    pass


# -- chart spec ------------------------------------------------------------

class UnknownField(EngineError):
    pass


class UnsupportedMark(EngineError):
    pass


class EncodingTypeMismatch(EngineError):
    pass


# -- layout ----------------------------------------------------------------

class NegativeBarValue(EngineError):
    pass


class OutOfPlotArea(EngineError):
    pass


# -- sketch ----------------------------------------------------------------

class TooShort(EngineError):
    pass


class EmptySelection(EngineError):
    pass


class OpenPathOnPie(EngineError):
    pass


# -- intent ----------------------------------------------------------------

class TypeMismatch(EngineError):
    pass


class EmptyResult(EngineError):
    pass


class NoAdmissibleFacts(EngineError):
    pass


# -- facts -----------------------------------------------------------------

class TooFewValues(EngineError):
    pass


class TooFewPoints(EngineError):
    pass


# -- docstore --------------------------------------------------------------

class DuplicateId(EngineError):
    pass


class UnknownCard(EngineError):
    pass


class AlreadyGrouped(EngineError):
    pass


class TooFew(EngineError):
    pass


class InvalidTarget(EngineError):
    pass


class UnknownSession(EngineError):
    pass


#: errors caused by malformed input documents -> HTTP 422 / CLI exit 2
VALIDATION_ERRORS = (
    AllMissing,
    EmptyInput,
    RaggedRecords,
    UnknownField,
    UnsupportedMark,
    EncodingTypeMismatch,
    NegativeBarValue,
    TypeMismatch,
)

#: errors about missing entities -> HTTP 404
NOT_FOUND_ERRORS = (UnknownCard, UnknownSession)

#: errors about requests that are well-formed but cannot be honored -> 409 / CLI exit 3
CONFLICT_ERRORS = (
    OutOfPlotArea,
    TooShort,
    EmptySelection,
    OpenPathOnPie,
    EmptyResult,
    NoAdmissibleFacts,
    TooFewValues,
    TooFewPoints,
    DuplicateId,
    AlreadyGrouped,
    TooFew,
    InvalidTarget,
)
