"""Runtime values: numbers, booleans, strings, lists, functions, objects.

All values are immutable.  Rendering uses constructor syntax so printed
values read back as source: `(new posn 3 4)`, `(cons 1 empty)`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

from . import numeric
from .nodes import Expr


class EmptyList:
    """The empty list; a singleton."""

    _instance: "EmptyList | None" = None

    def __new__(cls) -> "EmptyList":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "empty"


EMPTY = EmptyList()


@dataclass(frozen=True)
class Cons:
    first: "Value"
    rest: "ListValue"


ListValue = Union[EmptyList, Cons]


@dataclass(eq=False)
class Closure:
    params: tuple[str, ...]
    body: Expr
    env: "Environment"
    name: str | None = None


@dataclass(eq=False)
class Primitive:
    name: str
    fn: Callable
    min_args: int
    max_args: int | None = None  # None = variadic


@dataclass(frozen=True)
class ObjectValue:
    class_name: str
    field_values: tuple["Value", ...] = field(default=())


class Environment:
    """Immutable-once-built name binding frames with a parent link."""

    __slots__ = ("bindings", "parent")

    def __init__(self, bindings: dict | None = None, parent: "Environment | None" = None):
        self.bindings = bindings if bindings is not None else {}
        self.parent = parent

    def lookup(self, name: str):
        env: Environment | None = self
        while env is not None:
            if name in env.bindings:
                return env.bindings[name]
            env = env.parent
        raise KeyError(name)

    def has(self, name: str) -> bool:
        try:
            self.lookup(name)
            return True
        except KeyError:
            return False

    def child(self, bindings: dict) -> "Environment":
        return Environment(bindings, self)


Value = Union[Fraction, int, float, bool, str, EmptyList, Cons, Closure, Primitive, ObjectValue]


def is_list(v: object) -> bool:
    return isinstance(v, (EmptyList, Cons))


def is_callable_value(v: object) -> bool:
    return isinstance(v, (Closure, Primitive))


def list_to_python(v: ListValue) -> list:
    out = []
    while isinstance(v, Cons):
        out.append(v.first)
        v = v.rest
    return out


def python_to_list(items) -> ListValue:
    acc: ListValue = EMPTY
    for item in reversed(list(items)):
        acc = Cons(item, acc)
    return acc


def render_value(v: Value) -> str:
    from .images import Scene, render_scene_text  # cycle-free at call time

    if isinstance(v, bool):
        return "true" if v else "false"
    if numeric.is_number(v):
        return numeric.render_number(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, EmptyList):
        return "empty"
    if isinstance(v, Cons):
        return f"(cons {render_value(v.first)} {render_value(v.rest)})"
    if isinstance(v, Closure):
        return f"#<function:{v.name}>" if v.name else "#<function>"
    if isinstance(v, Primitive):
        return f"#<primitive:{v.name}>"
    if isinstance(v, ObjectValue):
        if not v.field_values:
            return f"(new {v.class_name})"
        inner = " ".join(render_value(f) for f in v.field_values)
        return f"(new {v.class_name} {inner})"
    if isinstance(v, Scene):
        return render_scene_text(v)
    raise TypeError(f"not a value: {v!r}")
