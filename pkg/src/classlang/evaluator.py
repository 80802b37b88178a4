"""Purely functional tree-walking evaluator.

Programs evaluate strictly, left to right.  The global environment is
built once while the program loads (definitions never mutate existing
bindings) and evaluation itself has no observable effects, so the same
expression always yields structurally equal values.

Deep recursion: recursive programs are supported to at least ten
thousand nested sends.  Public entry points that may run user code that
deep should go through `run_deep`, which supplies a large thread stack;
past the guard limit the evaluator reports "recursion too deep" instead
of crashing.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import images, numeric, objects
from .errors import EvalError, LoadError
from .nodes import (
    And,
    App,
    BigBangDefn,
    Bool,
    CheckDefn,
    ClassDefn,
    Cond,
    ConstantDefn,
    Defn,
    Expr,
    FunctionDefn,
    If,
    Lambda,
    MethodDefn,
    New,
    Num,
    Or,
    Program,
    Send,
    Str,
    This,
    TopExpr,
    Var,
)
from .values import (
    EMPTY,
    Closure,
    Cons,
    EmptyList,
    Environment,
    ObjectValue,
    Primitive,
    Value,
    is_callable_value,
    is_list,
    render_value,
)

# calibrated against DEEP_STACK_BYTES: the C stack holds the guard depth
# times a few Python frames per eval entry with room to spare
MAX_EVAL_DEPTH = 120_000

DEEP_STACK_BYTES = 512 * 1024 * 1024
DEEP_RECURSION_LIMIT = 2_000_000
_DEEP_LOCK = threading.Lock()


def run_deep(fn):
    """Run `fn` on a thread with a large stack so deeply recursive
    programs evaluate without exhausting the C stack."""
    box: dict = {}

    def runner():
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(DEEP_RECURSION_LIMIT)
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised on the calling thread
            box["error"] = exc
        finally:
            sys.setrecursionlimit(old_limit)

    with _DEEP_LOCK:
        old_size = threading.stack_size(DEEP_STACK_BYTES)
        try:
            thread = threading.Thread(target=runner, name="classlang-eval")
            thread.start()
        finally:
            threading.stack_size(old_size)
    thread.join()
    if "error" in box:
        error = box["error"]
        if isinstance(error, RecursionError):
            raise EvalError("recursion too deep")
        raise error
    return box["value"]


class Interp:
    """Evaluation context: global environment, class table, depth guard."""

    def __init__(self, level: int = 4):
        self.level = level
        self.table = objects.ClassTable()
        primitives = Environment(_make_primitives(self))
        self.global_env = Environment({}, primitives)
        self._primitives_frame = primitives
        self._depth = 0

    # -- expression evaluation ----------------------------------------------

    def eval(self, e: Expr, env: Environment) -> Value:
        self._depth += 1
        if self._depth > MAX_EVAL_DEPTH:
            self._depth -= 1
            raise EvalError("recursion too deep", e.pos.line, e.pos.col)
        try:
            return self._eval(e, env)
        finally:
            self._depth -= 1

    def _eval(self, e: Expr, env: Environment) -> Value:
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Bool):
            return e.value
        if isinstance(e, Str):
            return e.value
        if isinstance(e, Var):
            try:
                return env.lookup(e.name)
            except KeyError:
                raise EvalError(f"{e.name}: this variable is not defined",
                                e.pos.line, e.pos.col) from None
        if isinstance(e, This):
            try:
                return env.lookup("this")
            except KeyError:
                raise EvalError("this may only be used inside a method body",
                                e.pos.line, e.pos.col) from None
        if isinstance(e, Lambda):
            return Closure(e.params, e.body, env)
        if isinstance(e, App):
            fn = self.eval(e.fn, env)
            args = [self.eval(a, env) for a in e.args]
            return self.apply(fn, args, e.pos)
        if isinstance(e, If):
            return self._eval_branch(e.question, e.then, e.otherwise, env, "if")
        if isinstance(e, Cond):
            for clause in e.clauses:
                test = self.eval(clause.question, env)
                self._require_bool(test, "cond", clause.question)
                if test:
                    return self.eval(clause.answer, env)
            if e.else_answer is not None:
                return self.eval(e.else_answer, env)
            raise EvalError("cond: all question results were false", e.pos.line, e.pos.col)
        if isinstance(e, And):
            for arg in e.args:
                v = self.eval(arg, env)
                self._require_bool(v, "and", arg)
                if not v:
                    return False
            return True
        if isinstance(e, Or):
            for arg in e.args:
                v = self.eval(arg, env)
                self._require_bool(v, "or", arg)
                if v:
                    return True
            return False
        if isinstance(e, New):
            args = [self.eval(a, env) for a in e.args]
            return objects.instantiate(self.table, e.class_name, args, self, e.pos)
        if isinstance(e, Send):
            receiver = self.eval(e.receiver, env)
            if not isinstance(receiver, ObjectValue):
                raise EvalError(f"send: expected an object, given {render_value(receiver)}",
                                e.pos.line, e.pos.col)
            args = [self.eval(a, env) for a in e.args]
            return objects.dispatch(self.table, receiver, e.message, args, self, e.pos)
        raise EvalError(f"cannot evaluate {e!r}")

    def _eval_branch(self, question, then, otherwise, env, what):
        test = self.eval(question, env)
        self._require_bool(test, what, question)
        return self.eval(then if test else otherwise, env)

    @staticmethod
    def _require_bool(v: Value, what: str, e: Expr) -> None:
        if not isinstance(v, bool):
            raise EvalError(f"{what}: question result is not true or false:"
                            f" {render_value(v)}", e.pos.line, e.pos.col)

    def apply(self, fn: Value, args: list[Value], pos=None) -> Value:
        line, col = (pos.line, pos.col) if pos else (None, None)
        if isinstance(fn, Primitive):
            n = len(args)
            if n < fn.min_args or (fn.max_args is not None and n > fn.max_args):
                raise EvalError(f"{fn.name}: expects {_arity_text(fn)},"
                                f" given {n}", line, col)
            return fn.fn(args)
        if isinstance(fn, Closure):
            if len(args) != len(fn.params):
                name = fn.name or "this function"
                raise EvalError(f"{name}: expects {len(fn.params)} argument(s),"
                                f" given {len(args)}", line, col)
            return self.eval(fn.body, fn.env.child(dict(zip(fn.params, args))))
        raise EvalError(f"function call: expected a function, given {render_value(fn)}",
                        line, col)


def _arity_text(p: Primitive) -> str:
    if p.max_args is None:
        return f"at least {p.min_args} argument(s)"
    if p.min_args == p.max_args:
        return f"{p.min_args} argument(s)"
    return f"between {p.min_args} and {p.max_args} arguments"


# ---------------------------------------------------------------------------
# primitives

def _num_args(name, args):
    for a in args:
        if not numeric.is_number(a):
            raise EvalError(f"{name}: expected a number, given {render_value(a)}")
    return args


def _list_arg(name, v):
    if not is_list(v):
        raise EvalError(f"{name}: expected a list, given {render_value(v)}")
    return v


def _callable_arg(name, v):
    if not is_callable_value(v):
        raise EvalError(f"{name}: expected a function, given {render_value(v)}")
    return v


def _fold_variadic(name, op, args):
    _num_args(name, args)
    acc = args[0]
    for b in args[1:]:
        acc = op(acc, b)
    return acc


def _compare_chain(name, rel, args):
    _num_args(name, args)
    return all(rel(a, b) for a, b in zip(args, args[1:]))


def _make_primitives(interp: Interp) -> dict[str, Value]:
    from .checks import value_equal

    def prim(name, fn, min_args, max_args=None):
        return Primitive(name, fn, min_args, max_args)

    def sub_or_negate(args):
        _num_args("-", args)
        if len(args) == 1:
            return -args[0]
        return _fold_variadic("-", numeric.sub, args)

    def div_or_invert(args):
        _num_args("/", args)
        if len(args) == 1:
            return numeric.div(Fraction(1), args[0])
        return _fold_variadic("/", numeric.div, args)

    def first_fn(args):
        v = _list_arg("first", args[0])
        if isinstance(v, EmptyList):
            raise EvalError("first: expects a non-empty list")
        return v.first

    def rest_fn(args):
        v = _list_arg("rest", args[0])
        if isinstance(v, EmptyList):
            raise EvalError("rest: expects a non-empty list")
        return v.rest

    def cons_fn(args):
        if not is_list(args[1]):
            raise EvalError(f"cons: second argument must be a list,"
                            f" given {render_value(args[1])}")
        return Cons(args[0], args[1])

    def length_fn(args):
        v = _list_arg("length", args[0])
        n = 0
        while isinstance(v, Cons):
            n, v = n + 1, v.rest
        return Fraction(n)

    def map_fn(args):
        fn = _callable_arg("map", args[0])
        items = _list_arg("map", args[1])
        out = []
        while isinstance(items, Cons):
            out.append(interp.apply(fn, [items.first]))
            items = items.rest
        acc: Value = EMPTY
        for item in reversed(out):
            acc = Cons(item, acc)
        return acc

    def filter_fn(args):
        fn = _callable_arg("filter", args[0])
        items = _list_arg("filter", args[1])
        kept = []
        while isinstance(items, Cons):
            keep = interp.apply(fn, [items.first])
            if not isinstance(keep, bool):
                raise EvalError("filter: predicate result is not true or false:"
                                f" {render_value(keep)}")
            if keep:
                kept.append(items.first)
            items = items.rest
        acc: Value = EMPTY
        for item in reversed(kept):
            acc = Cons(item, acc)
        return acc

    def foldr_fn(args):
        fn = _callable_arg("foldr", args[0])
        items = _list_arg("foldr", args[2])
        stack = []
        while isinstance(items, Cons):
            stack.append(items.first)
            items = items.rest
        acc = args[1]
        for item in reversed(stack):
            acc = interp.apply(fn, [item, acc])
        return acc

    def foldl_fn(args):
        fn = _callable_arg("foldl", args[0])
        items = _list_arg("foldl", args[2])
        acc = args[1]
        while isinstance(items, Cons):
            acc = interp.apply(fn, [items.first, acc])
            items = items.rest
        return acc

    def string_eq(args):
        for a in args:
            if not isinstance(a, str):
                raise EvalError(f"string=?: expected a string, given {render_value(a)}")
        return all(a == b for a, b in zip(args, args[1:]))

    def string_append(args):
        for a in args:
            if not isinstance(a, str):
                raise EvalError(f"string-append: expected a string, given {render_value(a)}")
        return "".join(args)

    def not_fn(args):
        if not isinstance(args[0], bool):
            raise EvalError(f"not: expected true or false, given {render_value(args[0])}")
        return not args[0]

    return {
        "+": prim("+", lambda a: _fold_variadic("+", numeric.add, a), 2),
        "-": prim("-", sub_or_negate, 1),
        "*": prim("*", lambda a: _fold_variadic("*", numeric.mul, a), 2),
        "/": prim("/", div_or_invert, 1),
        "=": prim("=", lambda a: _compare_chain("=", lambda x, y: x == y, a), 2),
        "<": prim("<", lambda a: _compare_chain("<", lambda x, y: x < y, a), 2),
        ">": prim(">", lambda a: _compare_chain(">", lambda x, y: x > y, a), 2),
        "<=": prim("<=", lambda a: _compare_chain("<=", lambda x, y: x <= y, a), 2),
        ">=": prim(">=", lambda a: _compare_chain(">=", lambda x, y: x >= y, a), 2),
        "sqrt": prim("sqrt", lambda a: numeric.sqrt(a[0]), 1, 1),
        "sqr": prim("sqr", lambda a: numeric.sqr(a[0]), 1, 1),
        "add1": prim("add1", lambda a: numeric.add1(a[0]), 1, 1),
        "sub1": prim("sub1", lambda a: numeric.sub1(a[0]), 1, 1),
        "zero?": prim("zero?", lambda a: numeric.is_zero(a[0]), 1, 1),
        "abs": prim("abs", lambda a: abs(_num_args("abs", a)[0]), 1, 1),
        "empty": EMPTY,
        "cons": prim("cons", cons_fn, 2, 2),
        "first": prim("first", first_fn, 1, 1),
        "rest": prim("rest", rest_fn, 1, 1),
        "empty?": prim("empty?", lambda a: isinstance(a[0], EmptyList), 1, 1),
        "cons?": prim("cons?", lambda a: isinstance(a[0], Cons), 1, 1),
        "length": prim("length", length_fn, 1, 1),
        "map": prim("map", map_fn, 2, 2),
        "filter": prim("filter", filter_fn, 2, 2),
        "foldr": prim("foldr", foldr_fn, 3, 3),
        "foldl": prim("foldl", foldl_fn, 3, 3),
        "not": prim("not", not_fn, 1, 1),
        "equal?": prim("equal?", lambda a: value_equal(a[0], a[1]), 2, 2),
        "string=?": prim("string=?", string_eq, 2),
        "string-append": prim("string-append", string_append, 2),
        "circle": prim("circle", lambda a: images.circle(a[0], a[1], a[2]), 3, 3),
        "empty-scene": prim("empty-scene", lambda a: images.empty_scene(a[0], a[1]), 2, 2),
        "place-image": prim("place-image",
                            lambda a: images.place_image(a[0], a[1], a[2], a[3]), 4, 4),
    }


# ---------------------------------------------------------------------------
# whole programs

@dataclass
class ProgramResult:
    program: Program
    interp: Interp
    printed: list[Value] = dc_field(default_factory=list)
    report: "object | None" = None  # checks.TestReport
    initial_world: ObjectValue | None = None
    warnings: list[str] = dc_field(default_factory=list)

    @property
    def env(self) -> Environment:
        return self.interp.global_env

    @property
    def table(self) -> objects.ClassTable:
        return self.interp.table


def iter_subexprs(e: Expr):
    yield e
    if isinstance(e, Lambda):
        yield from iter_subexprs(e.body)
    elif isinstance(e, App):
        yield from iter_subexprs(e.fn)
        for a in e.args:
            yield from iter_subexprs(a)
    elif isinstance(e, Cond):
        for c in e.clauses:
            yield from iter_subexprs(c.question)
            yield from iter_subexprs(c.answer)
        if e.else_answer is not None:
            yield from iter_subexprs(e.else_answer)
    elif isinstance(e, If):
        yield from iter_subexprs(e.question)
        yield from iter_subexprs(e.then)
        yield from iter_subexprs(e.otherwise)
    elif isinstance(e, (And, Or)):
        for a in e.args:
            yield from iter_subexprs(a)
    elif isinstance(e, New):
        for a in e.args:
            yield from iter_subexprs(a)
    elif isinstance(e, Send):
        yield from iter_subexprs(e.receiver)
        for a in e.args:
            yield from iter_subexprs(a)


def _reject_this(exprs, where: str) -> None:
    for root in exprs:
        for node in iter_subexprs(root):
            if isinstance(node, This):
                raise LoadError(f"this may only be used inside a method body"
                                f" (found in {where})", node.pos.line, node.pos.col)


def validate_this_usage(defns: tuple[Defn, ...]) -> None:
    for defn in defns:
        if isinstance(defn, FunctionDefn):
            _reject_this([defn.body], f"function {defn.name}")
        elif isinstance(defn, ConstantDefn):
            _reject_this([defn.expr], f"the definition of {defn.name}")
        elif isinstance(defn, CheckDefn):
            exprs = [defn.actual, defn.expected] + ([defn.tolerance] if defn.tolerance else [])
            _reject_this(exprs, "a check form")
        elif isinstance(defn, TopExpr):
            _reject_this([defn.expr], "a top-level expression")
        elif isinstance(defn, BigBangDefn):
            _reject_this([defn.expr], "big-bang")
        elif isinstance(defn, ClassDefn):
            for item in defn.body:
                if isinstance(item, CheckDefn):
                    exprs = [item.actual, item.expected] + (
                        [item.tolerance] if item.tolerance else [])
                    _reject_this(exprs, "a check form")
            if defn.constructor is not None:
                _reject_this(defn.constructor.field_exprs,
                             f"the constructor of class {defn.name}")


def eval_program(program: Program, *, run_checks: bool = True) -> ProgramResult:
    """Load a program: process definitions in order, then run its tests."""
    from . import checks

    interp = Interp(program.level)
    result = ProgramResult(program, interp)
    validate_this_usage(program.defns)
    defined: set[str] = set()

    def bind(name: str, value: Value, pos) -> None:
        if name in defined:
            raise LoadError(f"{name} is defined twice", pos.line, pos.col)
        if interp._primitives_frame.has(name):
            result.warnings.append(f"definition of {name} shadows a built-in")
        defined.add(name)
        interp.global_env.bindings[name] = value

    try:
        for defn in program.defns:
            if isinstance(defn, FunctionDefn):
                bind(defn.name,
                     Closure(defn.params, defn.body, interp.global_env, name=defn.name),
                     defn.pos)
            elif isinstance(defn, ConstantDefn):
                bind(defn.name, interp.eval(defn.expr, interp.global_env), defn.pos)
            elif isinstance(defn, ClassDefn):
                if defn.name in defined:
                    raise LoadError(f"{defn.name} is defined twice",
                                    defn.pos.line, defn.pos.col)
                objects.register_class(interp.table, defn, program.level)
                defined.add(defn.name)
            elif isinstance(defn, TopExpr):
                result.printed.append(interp.eval(defn.expr, interp.global_env))
            elif isinstance(defn, BigBangDefn):
                world = interp.eval(defn.expr, interp.global_env)
                if not isinstance(world, ObjectValue):
                    raise EvalError("big-bang: the initial world must be an object",
                                    defn.pos.line, defn.pos.col)
                if not interp.table.has_method(world.class_name, "to-draw"):
                    raise EvalError(
                        f"big-bang: world of class {world.class_name} does not provide"
                        " a to-draw method", defn.pos.line, defn.pos.col)
                result.initial_world = world
    except RecursionError:
        raise EvalError("recursion too deep") from None

    if run_checks:
        cases = checks.lift_tests(program.defns)
        result.report = checks.run_tests(cases, interp)
    return result


def env_fingerprint(env: Environment) -> int:
    """Identity-based structural snapshot of an environment chain; values
    are immutable so binding identity captures the whole state."""
    parts = []
    frame: Environment | None = env
    while frame is not None:
        for name in sorted(frame.bindings):
            parts.append((name, id(frame.bindings[name])))
        frame = frame.parent
    return hash(tuple(parts))
