"""Desugared abstract syntax.

Positions are carried for diagnostics but excluded from structural
equality, so a pretty-printed and re-parsed expression compares equal to
the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union


@dataclass(frozen=True)
class Pos:
    line: int
    col: int


NOPOS = Pos(0, 0)


@dataclass(frozen=True)
class Num:
    value: Fraction | float
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class Bool:
    value: bool
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class Str:
    value: str
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class This:
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class Lambda:
    params: tuple[str, ...]
    body: "Expr"
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class App:
    fn: "Expr"
    args: tuple["Expr", ...]
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class CondClause:
    question: "Expr"
    answer: "Expr"


@dataclass(frozen=True)
class Cond:
    clauses: tuple[CondClause, ...]
    else_answer: Union["Expr", None]
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class If:
    question: "Expr"
    then: "Expr"
    otherwise: "Expr"
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class And:
    args: tuple["Expr", ...]
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class Or:
    args: tuple["Expr", ...]
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class New:
    class_name: str
    args: tuple["Expr", ...]
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class Send:
    receiver: "Expr"
    message: str
    args: tuple["Expr", ...]
    pos: Pos = field(default=NOPOS, compare=False)


Expr = Union[Num, Bool, Str, Var, This, Lambda, App, Cond, If, And, Or, New, Send]


@dataclass(frozen=True)
class FunctionDefn:
    name: str
    params: tuple[str, ...]
    body: Expr
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class ConstantDefn:
    name: str
    expr: Expr
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class CheckDefn:
    """check-expect or (with a tolerance) check-within."""

    actual: Expr
    expected: Expr
    tolerance: Expr | None = None
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class MethodDefn:
    name: str
    params: tuple[str, ...]
    body: Expr
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class ConstructorDefn:
    params: tuple[str, ...]
    field_exprs: tuple[Expr, ...]
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class ClassDefn:
    name: str
    super_name: str | None
    fields: tuple[str, ...]
    body: tuple[Union[MethodDefn, CheckDefn], ...]  # source order, for test lifting
    constructor: ConstructorDefn | None = None
    pos: Pos = field(default=NOPOS, compare=False)

    def methods(self) -> tuple[MethodDefn, ...]:
        return tuple(item for item in self.body if isinstance(item, MethodDefn))


@dataclass(frozen=True)
class BigBangDefn:
    expr: Expr
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class TopExpr:
    expr: Expr
    pos: Pos = field(default=NOPOS, compare=False)


Defn = Union[FunctionDefn, ConstantDefn, CheckDefn, ClassDefn, BigBangDefn, TopExpr]


@dataclass(frozen=True)
class Program:
    defns: tuple[Defn, ...]
    level: int
