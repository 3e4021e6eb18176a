"""Shared error taxonomy.

Every exception carries a stable ``code`` (the token clients see on the
wire) and the HTTP status the service maps it to: 400 for input
validation, 404 for unknown ids, 409 for state-machine violations.
"""

from __future__ import annotations


class KcatError(Exception):
    code = "InternalError"
    http_status = 500


# -- input / file validation ------------------------------------------------

class ParseError(KcatError):
    """Malformed or schema-violating input file."""
    code = "ParseError"
    http_status = 400


class CycleError(KcatError):
    """Type hierarchy edges form a cycle."""
    code = "CycleError"
    http_status = 400


class DanglingRefError(KcatError):
    """Reference to a type or entity id that does not exist."""
    code = "DanglingRefError"
    http_status = 400


class EmptyInput(KcatError):
    code = "EmptyInput"
    http_status = 400


class UnknownFormat(KcatError):
    code = "UnknownFormat"
    http_status = 400


class IoError(KcatError):
    """Filesystem read/write failure (distinct from the OSError builtin)."""
    code = "IoError"
    http_status = 500


class BindError(KcatError):
    """Service could not bind its listen address."""
    code = "BindError"
    http_status = 500


# -- unknown ids ------------------------------------------------------------

class UnknownType(KcatError):
    code = "UnknownType"
    http_status = 404


class UnknownDoc(KcatError):
    code = "UnknownDoc"
    http_status = 404


class UnknownMention(KcatError):
    code = "UnknownMention"
    http_status = 404


class UnknownSession(KcatError):
    code = "UnknownSession"
    http_status = 404


# -- state-machine violations -----------------------------------------------

class NotInChain(KcatError):
    """Selected type does not strictly deepen the current selection chain."""
    code = "NotInChain"
    http_status = 409


class NotOffered(KcatError):
    """Type outside the currently constrained candidate type set."""
    code = "NotOffered"
    http_status = 409


class NotACandidate(KcatError):
    """Entity is not among the mention's current working candidates."""
    code = "NotACandidate"
    http_status = 409


class EmptyHistory(KcatError):
    """Undo/redo requested with an empty stack; a no-op signal, not fatal."""
    code = "EmptyHistory"
    http_status = 409


class NotOwner(KcatError):
    """Mutation attempted by an annotator that does not own the session."""
    code = "NotOwner"
    http_status = 409


class SessionBusy(KcatError):
    """Concurrent mutation of a single-writer session."""
    code = "SessionBusy"
    http_status = 409


# -- analytics --------------------------------------------------------------

class NoOverlap(KcatError):
    """Two annotation files share zero commonly labeled mentions."""
    code = "NoOverlap"
    http_status = 400


class TooFewAnnotators(KcatError):
    code = "TooFewAnnotators"
    http_status = 400
