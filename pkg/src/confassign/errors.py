"""Domain errors shared across the assignment engine.

Every error exposes ``.name`` (the class name) so the CLI and the service
can surface a stable machine-readable identifier.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-level failures."""

    @property
    def name(self) -> str:
        return type(self).__name__


# -- taxonomy / document parsing ------------------------------------------

class MalformedXml(EngineError):
    pass


class DuplicateId(EngineError):
    pass


class MultipleRoots(EngineError):
    pass


class EmptyDocument(EngineError):
    pass


# -- keyword and id lookups -----------------------------------------------

class UnknownKeyword(EngineError):
    pass


class EmptyPaperSet(EngineError):
    pass


class UnknownPaper(EngineError):
    pass


class UnknownReviewer(EngineError):
    pass


class UnknownId(EngineError):
    pass


class UnknownEdge(EngineError):
    pass


class InvalidConference(EngineError):
    pass


# -- solving ----------------------------------------------------------------

class Infeasible(EngineError):
    """Raised when an assignment cannot satisfy its constraints.

    ``starved`` lists the row indices / paper ids that could not be covered.
    """

    def __init__(self, message: str, starved: tuple = ()):  # type: ignore[type-arg]
        super().__init__(message)
        self.starved = tuple(starved)


# -- workflow ----------------------------------------------------------------

class IllegalState(EngineError):
    pass


class DuplicateEdge(EngineError):
    pass


class ConflictRequiresForce(EngineError):
    pass


class CapacityRequiresForce(EngineError):
    pass


class SchemaVersionMismatch(EngineError):
    pass


class MalformedDocument(EngineError):
    pass
