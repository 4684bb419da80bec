"""Exception types raised by the sceneforge pipeline.

Everything derives from :class:`SceneForgeError`, which the CLI maps to
exit code 2 (data error) and serializes as a machine-readable record.
"""

from __future__ import annotations


class SceneForgeError(Exception):
    """Base class for all expected pipeline failures."""

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def to_record(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "context": self.context,
        }


# -- asset catalog -----------------------------------------------------------

class MissingFile(SceneForgeError):
    pass


class SchemaViolation(SceneForgeError):
    pass


class UnknownMeshFormat(SceneForgeError):
    pass


class UnknownClass(SceneForgeError):
    pass


class EmptyName(SceneForgeError):
    pass


# -- prompt parsing ----------------------------------------------------------

class NoRelationFound(SceneForgeError):
    pass


class UnresolvableNoun(SceneForgeError):
    def __init__(self, noun: str):
        super().__init__(f"noun not in catalog or substitute table: {noun!r}", noun=noun)
        self.noun = noun


class TooManyRelations(SceneForgeError):
    pass


class NoOppositeDefined(SceneForgeError):
    pass


# -- scene assembly and rendering --------------------------------------------

class UnknownBackground(SceneForgeError):
    pass


class DegenerateCamera(SceneForgeError):
    pass


# -- guidance export ---------------------------------------------------------

class BadThresholds(SceneForgeError):
    pass


class UnsupportedFormat(SceneForgeError):
    pass


# -- question generation and scoring -----------------------------------------

class NoRelations(SceneForgeError):
    pass


class MalformedAst(SceneForgeError):
    pass


class MissingItems(SceneForgeError):
    def __init__(self, ids):
        ids = sorted(ids)
        super().__init__(f"{len(ids)} item id(s) absent from responses", ids=ids)
        self.ids = ids


# -- spatial-fidelity judging ------------------------------------------------

class WrongAxis(SceneForgeError):
    pass


class CentroidOutOfBounds(SceneForgeError):
    pass


class IncompleteGroup(SceneForgeError):
    pass
