"""Exception hierarchy shared by all gazeforge modules."""
from __future__ import annotations


class GazeforgeError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GazeforgeError):
    """An operation received invalid parameters (bad bounds, zero-length result, ...)."""


class ConstraintError(GazeforgeError):
    """A sequence ordering constraint cannot be satisfied."""

    def __init__(self, message: str, rule=None):
        super().__init__(message)
        self.rule = rule


class MappingError(GazeforgeError):
    """Gaze mapping failed (missing targets, unlabeled input, ...)."""


class ParseError(GazeforgeError):
    """Malformed input file.

    ``position`` is a human-readable location: a row number for CSV,
    a byte offset for PGM, a line/column for JSON.
    """

    def __init__(self, message: str, position: str | None = None):
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
        self.position = position


class ValidationError(GazeforgeError):
    """A config document violates the schema. ``field`` is the dotted path."""

    def __init__(self, message: str, field: str | None = None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
