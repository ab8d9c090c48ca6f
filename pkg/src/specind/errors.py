"""Exception types shared across the workbench."""

from __future__ import annotations


class ValidationError(ValueError):
    """A supplied value violates an operation's preconditions."""


class CapExceededError(RuntimeError):
    """An enumeration would exceed its configured size cap.

    Raised instead of silently truncating; callers that can proceed without
    the enumeration (e.g. certification with the comparison half skipped)
    catch this explicitly.
    """


class ParseError(ValueError):
    """A model file or region literal could not be parsed.

    Carries the offending location so command-line errors point at a line.
    """

    def __init__(self, message: str, *, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        loc = ""
        if path is not None:
            loc += f"{path}:"
        if line is not None:
            loc += f"line {line}: "
        elif loc:
            loc += " "
        super().__init__(loc + message)


class NonConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance.

    The residual at the point of failure is attached for diagnosis.
    """

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)


class InternalError(RuntimeError):
    """An internal consistency check failed: a bug, not a user error."""
