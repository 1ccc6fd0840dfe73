"""Exception hierarchy shared by the library and the command line."""


class CausalFlowError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class UnknownVertexError(CausalFlowError, KeyError):
    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"unknown vertex {vertex!r}")

    def __str__(self):
        return self.args[0]


class NotASourceError(CausalFlowError):
    pass


class InconsistentModelError(CausalFlowError):
    """Raised when a model has no unique fixed point for some intervention.

    ``witness`` holds whatever pins the failure down: a function family for
    consistency checks, or a joint setting for contractions.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnfaithfulModelError(CausalFlowError):
    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


class LimitExceededError(CausalFlowError):
    pass


class ParseError(CausalFlowError, ValueError):
    """Malformed input file (CLI exit code 2)."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
