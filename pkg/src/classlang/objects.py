"""Class definitions, instantiation and message dispatch.

The class table is built while a program loads and frozen afterwards;
dispatch only reads it.  Message lookup tries the receiver's fields
first, then searches the method chain from the receiver's class up
through its superclasses (most-derived wins, which is what makes
overriding work at class/3).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EvalError, LevelError, LoadError
from .nodes import ClassDefn, ConstructorDefn, Expr, MethodDefn, Pos
from .values import Environment, ObjectValue, Value


@dataclass(frozen=True)
class Method:
    name: str
    params: tuple[str, ...]
    body: Expr
    pos: Pos


@dataclass(frozen=True)
class ClassDef:
    name: str
    super_name: str | None
    own_fields: tuple[str, ...]
    methods: dict[str, Method]
    constructor: ConstructorDefn | None
    pos: Pos


class ClassTable:
    def __init__(self) -> None:
        self.classes: dict[str, ClassDef] = {}

    def __contains__(self, name: str) -> bool:
        return name in self.classes

    def get(self, name: str) -> ClassDef:
        return self.classes[name]

    def chain(self, name: str) -> list[ClassDef]:
        """The class and its superclasses, most derived first."""
        out = []
        current: str | None = name
        while current is not None:
            cdef = self.classes[current]
            out.append(cdef)
            current = cdef.super_name
        return out

    def all_fields(self, name: str) -> tuple[str, ...]:
        """Every field of a class, inherited fields first."""
        fields: list[str] = []
        for cdef in reversed(self.chain(name)):
            fields.extend(cdef.own_fields)
        return tuple(fields)

    def find_method(self, name: str, message: str) -> Method | None:
        for cdef in self.chain(name):
            if message in cdef.methods:
                return cdef.methods[message]
        return None

    def has_method(self, name: str, message: str) -> bool:
        return self.find_method(name, message) is not None


def register_class(table: ClassTable, defn: ClassDefn, level: int) -> ClassTable:
    """Validate and add one class definition; returns the same table."""
    pos = defn.pos
    if defn.name in table:
        raise LoadError(f"class {defn.name} is already defined", pos.line, pos.col)
    if defn.super_name is not None and defn.super_name not in table:
        raise LoadError(f"unknown super class {defn.super_name}", pos.line, pos.col)

    inherited_fields = table.all_fields(defn.super_name) if defn.super_name else ()
    seen = set(inherited_fields)
    for fname in defn.fields:
        if fname in seen and fname not in inherited_fields:
            raise LoadError(f"field {fname} is declared twice in class {defn.name}",
                            pos.line, pos.col)
        if fname in inherited_fields:
            raise LoadError(
                f"field {fname} of class {defn.name} collides with an inherited field",
                pos.line, pos.col)
        if defn.super_name is not None and table.find_method(defn.super_name, fname):
            raise LoadError(
                f"field {fname} of class {defn.name} collides with an inherited method",
                pos.line, pos.col)
        seen.add(fname)

    all_fields = inherited_fields + defn.fields
    methods: dict[str, Method] = {}
    for item in defn.body:
        if not isinstance(item, MethodDefn):
            continue
        if item.name in methods:
            raise LoadError(f"method {item.name} is defined twice in class {defn.name}",
                            item.pos.line, item.pos.col)
        if item.name in all_fields:
            raise LoadError(
                f"{item.name} names both a field and a method of class {defn.name}",
                item.pos.line, item.pos.col)
        if (defn.super_name is not None and level < 3
                and table.find_method(defn.super_name, item.name) is not None):
            raise LevelError("overriding requires class/3", 3, item.pos.line, item.pos.col)
        methods[item.name] = Method(item.name, item.params, item.body, item.pos)

    if defn.constructor is not None and len(defn.constructor.field_exprs) != len(all_fields):
        raise LoadError(
            f"constructor of class {defn.name} must initialize {len(all_fields)}"
            f" field(s), found {len(defn.constructor.field_exprs)} initializer(s)",
            defn.constructor.pos.line, defn.constructor.pos.col)

    table.classes[defn.name] = ClassDef(
        defn.name, defn.super_name, defn.fields, methods, defn.constructor, pos)
    return table


def instantiate(table: ClassTable, class_name: str, args: list[Value], interp,
                pos: Pos | None = None) -> ObjectValue:
    line, col = (pos.line, pos.col) if pos else (None, None)
    if class_name not in table:
        raise EvalError(f"unknown class {class_name}", line, col)
    cdef = table.get(class_name)
    fields = table.all_fields(class_name)
    if cdef.constructor is not None:
        ctor = cdef.constructor
        if len(args) != len(ctor.params):
            raise EvalError(
                f"constructor of class {class_name} expects {len(ctor.params)}"
                f" argument(s), given {len(args)}", line, col)
        frame = interp.global_env.child(dict(zip(ctor.params, args)))
        field_values = tuple(interp.eval(e, frame) for e in ctor.field_exprs)
        return ObjectValue(class_name, field_values)
    if len(args) != len(fields):
        raise EvalError(f"class {class_name} expects {len(fields)} argument(s),"
                        f" given {len(args)}", line, col)
    return ObjectValue(class_name, tuple(args))


def dispatch(table: ClassTable, receiver: ObjectValue, message: str, args: list[Value],
             interp, pos: Pos | None = None) -> Value:
    line, col = (pos.line, pos.col) if pos else (None, None)
    fields = table.all_fields(receiver.class_name)
    if message in fields:
        if args:
            raise EvalError(f"field {message} of class {receiver.class_name}"
                            " takes no arguments", line, col)
        return receiver.field_values[fields.index(message)]
    method = table.find_method(receiver.class_name, message)
    if method is None:
        raise EvalError(
            f"object of class {receiver.class_name} does not understand message {message}",
            line, col)
    if len(args) != len(method.params):
        raise EvalError(
            f"method {message} of class {receiver.class_name} expects"
            f" {len(method.params)} argument(s), given {len(args)}", line, col)
    frame_bindings: dict[str, Value] = dict(zip(method.params, args))
    frame_bindings["this"] = receiver
    frame = interp.global_env.child(frame_bindings)
    return interp.eval(method.body, frame)
