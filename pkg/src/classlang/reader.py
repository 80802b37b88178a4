"""Tokenizer and parser for class/N source text.

The surface syntax is s-expressions plus the infix dot notation for
message sends.  Parsing performs the dot desugaring, so no dot survives
into the AST, and rejects constructs above the active language level:

    level 0  classes and objects
    level 1  dot notation for method calls
    level 2  super classes
    level 3  overriding (checked at class registration)
    level 4  constructors

A dot splits an atom even without surrounding whitespace (``x.m`` and
``. m`` both read as a dot token), except inside a decimal literal such
as ``1.5``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Union

from . import numeric
from .errors import LevelError, LexError, ParseError
from .nodes import (
    And,
    App,
    BigBangDefn,
    Bool,
    CheckDefn,
    ClassDefn,
    Cond,
    CondClause,
    ConstantDefn,
    ConstructorDefn,
    Defn,
    Expr,
    FunctionDefn,
    If,
    Lambda,
    MethodDefn,
    New,
    Num,
    Or,
    Pos,
    Program,
    Send,
    Str,
    This,
    TopExpr,
    Var,
)

MIN_LEVEL = 0
MAX_LEVEL = 4

_LANG_RE = re.compile(r"#lang\s+(\S+)\s*$")
_CLASS_LANG_RE = re.compile(r"class/(\d+)$")

_DELIMS = set(" \t\r\n()[]\";")
_OPEN_FOR = {")": "(", "]": "["}
_CLOSE_FOR = {"(": ")", "[": "]"}

RESERVED = frozenset({
    "define", "define-class", "lambda", "cond", "else", "if", "and", "or",
    "new", "send", "this", "check-expect", "check-within", "fields",
    "super", "constructor", "big-bang", "require",
})


@dataclass(frozen=True)
class Token:
    kind: str  # lparen | rparen | dot | identifier | number | string | boolean
    text: str
    pos: Pos
    value: object = None


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]
    pos: Pos


SExpr = Union[Token, SList]


def check_level(level: int) -> int:
    if not isinstance(level, int) or not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ValueError(f"language level must be an integer in {MIN_LEVEL}..{MAX_LEVEL}, got {level!r}")
    return level


def strip_lang_header(source: str) -> tuple[int | None, str]:
    """Recognize a `#lang class/N` first line; return (level, source with the
    header blanked out so positions stay aligned)."""
    newline = source.find("\n")
    first = source[:newline] if newline >= 0 else source
    if not first.startswith("#lang"):
        return None, source
    m = _LANG_RE.match(first.strip())
    lang = m.group(1) if m else first.strip()
    cm = _CLASS_LANG_RE.fullmatch(lang) if m else None
    if not cm:
        raise ParseError(f"unsupported language {lang!r}: expected class/0 .. class/{MAX_LEVEL}", 1, 1)
    level = int(cm.group(1))
    if level > MAX_LEVEL:
        raise ParseError(f"unsupported language {lang!r}: expected class/0 .. class/{MAX_LEVEL}", 1, 1)
    # the header line becomes empty, keeping later positions aligned
    return level, source[newline:] if newline >= 0 else ""


# ---------------------------------------------------------------------------
# tokenizer

_PART_INT_RE = re.compile(r"[+-]?\d+")
_PART_FRAC_RE = re.compile(r"[+-]?\d+/\d+")


def _classify_atom_part(part: str, pos: Pos) -> Token:
    if _PART_INT_RE.fullmatch(part) or _PART_FRAC_RE.fullmatch(part):
        try:
            return Token("number", part, pos, numeric.parse_number(part))
        except ValueError as exc:
            raise LexError(str(exc), pos.line, pos.col) from None
    if part in ("true", "false"):
        return Token("boolean", part, pos, part == "true")
    return Token("identifier", part, pos)


def _split_atom(atom: str, pos: Pos) -> list[Token]:
    """Classify one delimiter-bounded atom, splitting on dots when the atom
    is not a numeric literal (so `.sum` reads as a dot and a name)."""
    if atom == ".":
        return [Token("dot", ".", pos)]
    if numeric.is_number_literal(atom):
        try:
            return [Token("number", atom, pos, numeric.parse_number(atom))]
        except ValueError as exc:
            raise LexError(str(exc), pos.line, pos.col) from None
    if "." not in atom:
        return [_classify_atom_part(atom, pos)]
    tokens: list[Token] = []
    offset = 0
    for i, part in enumerate(atom.split(".")):
        if i > 0:
            tokens.append(Token("dot", ".", Pos(pos.line, pos.col + offset - 1)))
        if part:
            tokens.append(_classify_atom_part(part, Pos(pos.line, pos.col + offset)))
        offset += len(part) + 1
    return tokens


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
        elif c in " \t\r":
            i, col = i + 1, col + 1
        elif c == ";":
            while i < n and source[i] != "\n":
                i += 1
        elif c in "([":
            tokens.append(Token("lparen", c, Pos(line, col)))
            i, col = i + 1, col + 1
        elif c in ")]":
            tokens.append(Token("rparen", c, Pos(line, col)))
            i, col = i + 1, col + 1
        elif c == '"':
            start = Pos(line, col)
            start_idx = i
            i, col = i + 1, col + 1
            chars: list[str] = []
            while True:
                if i >= n:
                    raise LexError("unterminated string literal", start.line, start.col)
                c = source[i]
                if c == '"':
                    i, col = i + 1, col + 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise LexError("unterminated string literal", start.line, start.col)
                    esc = source[i + 1]
                    chars.append({"n": "\n", "t": "\t"}.get(esc, esc))
                    i, col = i + 2, col + 2
                elif c == "\n":
                    chars.append(c)
                    i, line, col = i + 1, line + 1, 1
                else:
                    chars.append(c)
                    i, col = i + 1, col + 1
            tokens.append(Token("string", source[start_idx:i], start, "".join(chars)))
        else:
            start = Pos(line, col)
            j = i
            while j < n and source[j] not in _DELIMS:
                j += 1
            tokens.extend(_split_atom(source[i:j], start))
            col += j - i
            i = j
    return tokens


# ---------------------------------------------------------------------------
# grouping

def group_tokens(tokens: list[Token]) -> list[SExpr]:
    stack: list[tuple[Token, list[SExpr]]] = []
    top: list[SExpr] = []
    for tok in tokens:
        if tok.kind == "lparen":
            stack.append((tok, []))
        elif tok.kind == "rparen":
            if not stack:
                raise ParseError(f"unexpected `{tok.text}`", tok.pos.line, tok.pos.col)
            opener, items = stack.pop()
            if _OPEN_FOR[tok.text] != opener.text:
                raise ParseError(
                    f"expected `{_CLOSE_FOR[opener.text]}` to close `{opener.text}`"
                    f" opened at line {opener.pos.line}, column {opener.pos.col}",
                    tok.pos.line, tok.pos.col)
            slist = SList(tuple(items), opener.pos)
            (stack[-1][1] if stack else top).append(slist)
        else:
            (stack[-1][1] if stack else top).append(tok)
    if stack:
        opener, _ = stack[-1]
        raise ParseError(f"expected `{_CLOSE_FOR[opener.text]}` to close `{opener.text}`",
                         opener.pos.line, opener.pos.col)
    return top


# ---------------------------------------------------------------------------
# parsing

def _is_id(s: SExpr, text: str | None = None) -> bool:
    return isinstance(s, Token) and s.kind == "identifier" and (text is None or s.text == text)


def _head_keyword(s: SExpr) -> str | None:
    if isinstance(s, SList) and s.items and _is_id(s.items[0]):
        head = s.items[0].text
        if head in RESERVED:
            return head
    return None


def _binding_name(s: SExpr, what: str) -> str:
    if not (isinstance(s, Token) and s.kind == "identifier"):
        pos = s.pos
        raise ParseError(f"expected a {what} name", pos.line, pos.col)
    if s.text in RESERVED:
        raise ParseError(f"{s.text}: this keyword cannot be used as a {what} name",
                         s.pos.line, s.pos.col)
    return s.text


def _param_list(s: SExpr, what: str) -> tuple[str, ...]:
    if not isinstance(s, SList):
        raise ParseError(f"expected a parenthesized {what} parameter list", s.pos.line, s.pos.col)
    names: list[str] = []
    for item in s.items:
        name = _binding_name(item, "parameter")
        if name in names:
            raise ParseError(f"parameter {name} is declared twice", item.pos.line, item.pos.col)
        names.append(name)
    return tuple(names)


def desugar_dot(items: tuple[SExpr, ...], level: int, pos: Pos,
                parse: Callable[[SExpr], Expr]) -> Expr:
    """Left-associative expansion of `(e . m a ... . n b ...)` into nested
    sends; the first segment is exactly one receiver expression and every
    later segment is a message name followed by its arguments."""
    if level < 1:
        raise LevelError("dot notation requires class/1", 1, pos.line, pos.col)
    segments: list[list[SExpr]] = [[]]
    dot_positions: list[Pos] = []
    for item in items:
        if isinstance(item, Token) and item.kind == "dot":
            segments.append([])
            dot_positions.append(item.pos)
        else:
            segments[-1].append(item)
    receiver_seg = segments[0]
    first_dot = dot_positions[0]
    if not receiver_seg:
        raise ParseError("dot notation: missing receiver expression before `.`",
                         first_dot.line, first_dot.col)
    if len(receiver_seg) != 1:
        raise ParseError("dot notation: exactly one expression may precede the first `.`",
                         first_dot.line, first_dot.col)
    expr = parse(receiver_seg[0])
    for seg, dot_pos in zip(segments[1:], dot_positions):
        if not seg:
            raise ParseError("dot notation: expected a message name after `.`",
                             dot_pos.line, dot_pos.col)
        head = seg[0]
        if not (isinstance(head, Token) and head.kind == "identifier"):
            raise ParseError("dot notation: a message name must follow `.`",
                             head.pos.line, head.pos.col)
        if head.text in RESERVED:
            raise ParseError(f"{head.text}: this keyword cannot be used as a message name",
                             head.pos.line, head.pos.col)
        args = tuple(parse(s) for s in seg[1:])
        expr = Send(expr, head.text, args, pos=dot_pos)
    return expr


class _Parser:
    def __init__(self, level: int):
        self.level = check_level(level)

    # -- expressions --------------------------------------------------------

    def expr(self, s: SExpr) -> Expr:
        if isinstance(s, Token):
            return self._atom(s)
        if not s.items:
            raise ParseError("expected a function or expression after the open parenthesis",
                             s.pos.line, s.pos.col)
        if any(isinstance(it, Token) and it.kind == "dot" for it in s.items):
            return desugar_dot(s.items, self.level, s.pos, self.expr)
        keyword = _head_keyword(s)
        if keyword is not None:
            return self._special(keyword, s)
        fn = self.expr(s.items[0])
        args = tuple(self.expr(a) for a in s.items[1:])
        return App(fn, args, pos=s.pos)

    def _atom(self, tok: Token) -> Expr:
        if tok.kind == "number":
            return Num(tok.value, pos=tok.pos)
        if tok.kind == "boolean":
            return Bool(tok.value, pos=tok.pos)
        if tok.kind == "string":
            return Str(tok.value, pos=tok.pos)
        if tok.kind == "dot":
            raise ParseError("illegal use of `.` outside a method-call position",
                             tok.pos.line, tok.pos.col)
        if tok.text == "this":
            return This(pos=tok.pos)
        if tok.text in RESERVED:
            raise ParseError(f"{tok.text}: expected an open parenthesis before {tok.text}",
                             tok.pos.line, tok.pos.col)
        return Var(tok.text, pos=tok.pos)

    def _special(self, keyword: str, s: SList) -> Expr:
        items = s.items
        pos = s.pos
        if keyword == "lambda":
            if len(items) != 3:
                raise ParseError("lambda: expected a parameter list and one body expression",
                                 pos.line, pos.col)
            return Lambda(_param_list(items[1], "lambda"), self.expr(items[2]), pos=pos)
        if keyword == "if":
            if len(items) != 4:
                raise ParseError("if: expected a question, an answer and an else answer",
                                 pos.line, pos.col)
            return If(self.expr(items[1]), self.expr(items[2]), self.expr(items[3]), pos=pos)
        if keyword == "cond":
            return self._cond(s)
        if keyword in ("and", "or"):
            if len(items) < 3:
                raise ParseError(f"{keyword}: expected at least 2 arguments", pos.line, pos.col)
            args = tuple(self.expr(a) for a in items[1:])
            return (And if keyword == "and" else Or)(args, pos=pos)
        if keyword == "new":
            if len(items) < 2:
                raise ParseError("new: expected a class name", pos.line, pos.col)
            name = _binding_name(items[1], "class")
            return New(name, tuple(self.expr(a) for a in items[2:]), pos=pos)
        if keyword == "send":
            if len(items) < 3:
                raise ParseError("send: expected an object and a message name", pos.line, pos.col)
            message = _binding_name(items[2], "message")
            return Send(self.expr(items[1]), message,
                        tuple(self.expr(a) for a in items[3:]), pos=pos)
        if keyword in ("define", "define-class"):
            raise ParseError(f"{keyword}: found a definition that is not at the top level",
                             pos.line, pos.col)
        if keyword in ("check-expect", "check-within"):
            raise ParseError(f"{keyword}: a test is only allowed at the top level of a"
                             " program or class body", pos.line, pos.col)
        if keyword == "big-bang":
            raise ParseError("big-bang is only allowed at the top level", pos.line, pos.col)
        if keyword == "require":
            raise ParseError("require is only allowed at the top level", pos.line, pos.col)
        raise ParseError(f"{keyword}: not allowed here", pos.line, pos.col)

    def _cond(self, s: SList) -> Expr:
        if len(s.items) < 2:
            raise ParseError("cond: expected at least one clause", s.pos.line, s.pos.col)
        clauses: list[CondClause] = []
        else_answer: Expr | None = None
        last = len(s.items) - 1
        for idx, clause in enumerate(s.items[1:], start=1):
            if not (isinstance(clause, SList) and len(clause.items) == 2):
                p = clause.pos
                raise ParseError("cond: expected a clause with a question and an answer",
                                 p.line, p.col)
            question, answer = clause.items
            if _is_id(question, "else"):
                if idx != last:
                    raise ParseError("cond: an else clause must be the last clause",
                                     question.pos.line, question.pos.col)
                else_answer = self.expr(answer)
            else:
                clauses.append(CondClause(self.expr(question), self.expr(answer)))
        return Cond(tuple(clauses), else_answer, pos=s.pos)

    # -- definitions --------------------------------------------------------

    def defn(self, s: SExpr) -> Defn | None:
        keyword = _head_keyword(s)
        if keyword == "define":
            return self._define(s)
        if keyword == "define-class":
            return self._define_class(s)
        if keyword in ("check-expect", "check-within"):
            return self._check(keyword, s)
        if keyword == "big-bang":
            if len(s.items) != 2:
                raise ParseError("big-bang: expected exactly one initial-world expression",
                                 s.pos.line, s.pos.col)
            return BigBangDefn(self.expr(s.items[1]), pos=s.pos)
        if keyword == "require":
            return None  # libraries are built in; the form is accepted and ignored
        return TopExpr(self.expr(s), pos=s.pos)

    def _define(self, s: SList) -> Defn:
        if len(s.items) != 3:
            raise ParseError("define: expected a name (or function header) and one expression",
                             s.pos.line, s.pos.col)
        _, target, body = s.items
        if isinstance(target, SList):
            if not target.items:
                raise ParseError("define: expected a function name", target.pos.line, target.pos.col)
            name = _binding_name(target.items[0], "function")
            params = _param_list(SList(target.items[1:], target.pos), "function")
            return FunctionDefn(name, params, self.expr(body), pos=s.pos)
        name = _binding_name(target, "constant")
        return ConstantDefn(name, self.expr(body), pos=s.pos)

    def _check(self, keyword: str, s: SList) -> CheckDefn:
        want = 3 if keyword == "check-expect" else 4
        if len(s.items) != want:
            raise ParseError(
                f"{keyword}: expected {want - 1} expressions", s.pos.line, s.pos.col)
        actual = self.expr(s.items[1])
        expected = self.expr(s.items[2])
        tolerance = self.expr(s.items[3]) if keyword == "check-within" else None
        return CheckDefn(actual, expected, tolerance, pos=s.pos)

    def _define_class(self, s: SList) -> ClassDefn:
        if len(s.items) < 2:
            raise ParseError("define-class: expected a class name", s.pos.line, s.pos.col)
        name = _binding_name(s.items[1], "class")
        super_name: str | None = None
        fields: tuple[str, ...] | None = None
        constructor: ConstructorDefn | None = None
        body: list[MethodDefn | CheckDefn] = []
        for item in s.items[2:]:
            keyword = _head_keyword(item)
            pos = item.pos
            if keyword == "super":
                if self.level < 2:
                    raise LevelError("super classes require class/2", 2, pos.line, pos.col)
                if super_name is not None:
                    raise ParseError("define-class: more than one super clause", pos.line, pos.col)
                if len(item.items) != 2:
                    raise ParseError("super: expected exactly one super class name",
                                     pos.line, pos.col)
                super_name = _binding_name(item.items[1], "class")
            elif keyword == "fields":
                if fields is not None:
                    raise ParseError("define-class: more than one fields clause", pos.line, pos.col)
                fields = tuple(_binding_name(f, "field") for f in item.items[1:])
            elif keyword == "constructor":
                if self.level < 4:
                    raise LevelError("constructors require class/4", 4, pos.line, pos.col)
                if constructor is not None:
                    raise ParseError("define-class: more than one constructor", pos.line, pos.col)
                constructor = self._constructor(item)
            elif keyword == "define":
                body.append(self._method(item))
            elif keyword in ("check-expect", "check-within"):
                body.append(self._check(keyword, item))
            else:
                raise ParseError(
                    "define-class: expected a fields/super/constructor clause, a method"
                    " definition or a check form", pos.line, pos.col)
        return ClassDefn(name, super_name, fields or (), tuple(body), constructor, pos=s.pos)

    def _method(self, s: SList) -> MethodDefn:
        if len(s.items) != 3 or not isinstance(s.items[1], SList):
            raise ParseError("define: a method needs a header and one body expression",
                             s.pos.line, s.pos.col)
        header = s.items[1]
        if not header.items:
            raise ParseError("define: expected a method name", header.pos.line, header.pos.col)
        name = _binding_name(header.items[0], "method")
        params = _param_list(SList(header.items[1:], header.pos), "method")
        return MethodDefn(name, params, self.expr(s.items[2]), pos=s.pos)

    def _constructor(self, s: SList) -> ConstructorDefn:
        if len(s.items) != 3:
            raise ParseError("constructor: expected a parameter list and a fields clause",
                             s.pos.line, s.pos.col)
        params = _param_list(s.items[1], "constructor")
        fields_clause = s.items[2]
        if _head_keyword(fields_clause) != "fields":
            raise ParseError("constructor: expected a (fields e ...) initializer clause",
                             fields_clause.pos.line, fields_clause.pos.col)
        exprs = tuple(self.expr(e) for e in fields_clause.items[1:])
        return ConstructorDefn(params, exprs, pos=s.pos)


def parse_program(tokens: list[Token], level: int) -> tuple[Defn, ...]:
    parser = _Parser(level)
    defns: list[Defn] = []
    for s in group_tokens(tokens):
        d = parser.defn(s)
        if d is not None:
            defns.append(d)
    return tuple(defns)


def parse_source(source: str, level: int | None = None, fallback_level: int = 1) -> Program:
    """Parse a whole source file.  An explicit `level` wins over the `#lang`
    header; with neither, `fallback_level` applies."""
    header_level, body = strip_lang_header(source)
    chosen = level if level is not None else (
        header_level if header_level is not None else fallback_level)
    check_level(chosen)
    return Program(parse_program(tokenize(body), chosen), chosen)


def parse_expr_source(source: str, level: int = MAX_LEVEL) -> Expr:
    """Parse a single expression (test helper and REPL-ish convenience)."""
    forms = group_tokens(tokenize(source))
    if len(forms) != 1:
        raise ParseError("expected exactly one expression", 1, 1)
    return _Parser(level).expr(forms[0])


# ---------------------------------------------------------------------------
# pretty-printing (canonical, fully desugared form)

def _quote_string(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def unparse_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return numeric.render_number(e.value)
    if isinstance(e, Bool):
        return "true" if e.value else "false"
    if isinstance(e, Str):
        return _quote_string(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, This):
        return "this"
    if isinstance(e, Lambda):
        return f"(lambda ({' '.join(e.params)}) {unparse_expr(e.body)})"
    if isinstance(e, App):
        return "(" + " ".join(unparse_expr(x) for x in (e.fn, *e.args)) + ")"
    if isinstance(e, Cond):
        parts = [f"[{unparse_expr(c.question)} {unparse_expr(c.answer)}]" for c in e.clauses]
        if e.else_answer is not None:
            parts.append(f"[else {unparse_expr(e.else_answer)}]")
        return "(cond " + " ".join(parts) + ")"
    if isinstance(e, If):
        return (f"(if {unparse_expr(e.question)} {unparse_expr(e.then)}"
                f" {unparse_expr(e.otherwise)})")
    if isinstance(e, And):
        return "(and " + " ".join(unparse_expr(x) for x in e.args) + ")"
    if isinstance(e, Or):
        return "(or " + " ".join(unparse_expr(x) for x in e.args) + ")"
    if isinstance(e, New):
        return "(new " + " ".join([e.class_name, *[unparse_expr(x) for x in e.args]]) + ")"
    if isinstance(e, Send):
        parts = ["send", unparse_expr(e.receiver), e.message]
        parts.extend(unparse_expr(x) for x in e.args)
        return "(" + " ".join(parts) + ")"
    raise TypeError(f"not an expression node: {e!r}")
