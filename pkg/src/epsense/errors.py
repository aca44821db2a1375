"""Exception hierarchy.

Bad arguments raise plain ``ValueError``; everything below signals a
problem discovered during computation.
"""


class EpsenseError(Exception):
    """Base class for computation-layer failures (CLI exit code 2)."""


class NumericError(EpsenseError):
    """A numerical routine failed; ``partial`` carries whatever was computed."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConsistencyError(EpsenseError):
    """Two independent computations disagree. Indicates a bug, not bad input."""


class PreconditionError(EpsenseError):
    """Input is well-formed but violates a mathematical precondition."""


class FitError(EpsenseError):
    """Too few usable points for a log-log fit."""
