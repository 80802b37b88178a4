"""Error types shared by every stage of the interpreter pipeline."""

from __future__ import annotations


class ClasslangError(Exception):
    """Base error; carries an optional source position (1-based line/col)."""

    kind = "error"

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.col}: {self.message}"
        return self.message


class LexError(ClasslangError):
    kind = "lex"


class ParseError(ClasslangError):
    kind = "parse"


class LevelError(ParseError):
    """A construct was used below the language level that introduces it."""

    kind = "level"

    def __init__(self, message: str, required_level: int,
                 line: int | None = None, col: int | None = None):
        super().__init__(message, line, col)
        self.required_level = required_level


class LoadError(ClasslangError):
    """Definition-time error: duplicate names, bad class registration, ..."""

    kind = "load"


class EvalError(ClasslangError):
    """Runtime error raised while evaluating an expression."""

    kind = "runtime"


class UsageError(ClasslangError):
    """The program cannot be used in the requested mode (e.g. no big-bang)."""

    kind = "usage"


class ProtocolError(ClasslangError):
    """Malformed or unknown message on a live session connection."""

    kind = "protocol"
