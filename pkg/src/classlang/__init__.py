"""classlang: an interpreter suite for the class/N teaching languages.

The languages are purely functional s-expression languages with classes,
objects, message dispatch, single inheritance and overriding, gated
behind five cumulative levels (class/0 .. class/4).  Numbers are exact
rationals unless an inexact value enters a computation.  Programs carry
their own check-expect tests, and world programs drive an event loop of
immutable world objects.
"""

from .errors import (
    ClasslangError,
    EvalError,
    LevelError,
    LexError,
    LoadError,
    ParseError,
    ProtocolError,
    UsageError,
)
from .evaluator import Interp, ProgramResult, eval_program, run_deep
from .reader import parse_program, parse_source, tokenize
from .values import render_value

__version__ = "0.1.0"

__all__ = [
    "ClasslangError",
    "EvalError",
    "LevelError",
    "LexError",
    "LoadError",
    "ParseError",
    "ProtocolError",
    "UsageError",
    "Interp",
    "ProgramResult",
    "eval_program",
    "run_deep",
    "parse_program",
    "parse_source",
    "tokenize",
    "render_value",
    "__version__",
]
