"""Exceptions raised by cva-lab."""
from __future__ import annotations


class CvaLabError(Exception):
    """Base class for all cva-lab errors."""


class DomainError(CvaLabError, ValueError):
    """An operation was applied outside its domain (non-open set, bad inclusion, empty input)."""


class UnsupportedOperationError(CvaLabError):
    """The operation is not defined for this algebra."""


class ConfigError(CvaLabError, ValueError):
    """Invalid model configuration or budget."""


class ParseError(CvaLabError, ValueError):
    """A space or valuation file could not be parsed."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None) -> None:
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class ValuationFormatError(ParseError):
    """A trace in a valuation file does not match the model's tuple encoding."""

    def __init__(self, message: str, trace_index: int | None = None, path: str | None = None) -> None:
        self.trace_index = trace_index
        if trace_index is not None:
            message = f"trace {trace_index}: {message}"
        super().__init__(message, path=path)
