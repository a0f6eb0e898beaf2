"""Exception hierarchy.

Validation problems subclass ``ValidationError`` (CLI exit code 2); I/O and
provider failures subclass ``ReadGradeError`` directly (exit code 1).
"""

from __future__ import annotations


class ReadGradeError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ReadGradeError, ValueError):
    """Input violates a documented precondition."""


class EmptyText(ValidationError):
    pass


class NotAWord(ValidationError):
    pass


class InvalidStats(ValidationError):
    pass


class BadConfig(ValidationError):
    pass


class WrongArity(ValidationError):
    pass


class MissingMetric(ValidationError):
    pass


class BadGrade(ValidationError):
    pass


class EmptyQuestion(ValidationError):
    pass


class UnknownFormat(ValidationError):
    pass


class NoData(ValidationError):
    def __init__(self, band: object = None, message: str | None = None) -> None:
        self.band = band
        super().__init__(message or f"no data for band {band}")


class NotAPermutation(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EmptyCorpus(ValidationError):
    pass


class RecordError(ValidationError):
    """A JSON Lines record could not be used; ``line`` is 1-based."""

    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class ParseError(RecordError):
    pass


class MissingField(RecordError):
    def __init__(self, line: int, name: str) -> None:
        self.name = name
        super().__init__(line, f"missing required field {name!r}")


class DuplicateId(RecordError):
    pass


class ConfigError(ValidationError):
    pass


class ProviderError(ReadGradeError):
    def __init__(self, message: str, item: object = None) -> None:
        self.item = item
        super().__init__(message if item is None else f"item {item}: {message}")
