"""check-expect / check-within collection, structural equality, reporting.

Tests written inside class bodies are lifted to run at top level after
the whole program has loaded; lifting preserves source order.  A test
whose evaluation raises a runtime error records a failure but never
aborts the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import numeric
from .errors import ClasslangError, EvalError
from .images import Circle, EmptyScene, PlaceImage, is_scene
from .nodes import CheckDefn, ClassDefn, Defn, Expr, MethodDefn, Pos
from .values import (
    Closure,
    Cons,
    EmptyList,
    ObjectValue,
    Primitive,
    Value,
    render_value,
)


@dataclass(frozen=True)
class TestOrigin:
    class_name: str | None = None
    method_name: str | None = None

    def describe(self) -> str:
        if self.class_name is None:
            return "top level"
        if self.method_name is None:
            return f"class {self.class_name}"
        return f"class {self.class_name}, method {self.method_name}"


@dataclass(frozen=True)
class TestCase:
    actual: Expr
    expected: Expr
    tolerance: Expr | None
    pos: Pos
    origin: TestOrigin


@dataclass(frozen=True)
class Failure:
    pos: Pos
    message: str
    actual_text: str | None = None
    expected_text: str | None = None


@dataclass
class TestReport:
    total: int = 0
    passed: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return self.passed == self.total

    def summary(self) -> str:
        if self.total == 0:
            return "0 tests"
        if self.all_passed:
            return f"{self.total} test{'s' if self.total != 1 else ''} passed"
        return f"{self.passed} of {self.total} tests passed"


def _case_from(defn: CheckDefn, origin: TestOrigin) -> TestCase:
    return TestCase(defn.actual, defn.expected, defn.tolerance, defn.pos, origin)


def lift_tests(defns: tuple[Defn, ...]) -> list[TestCase]:
    """Collect every test in source order; class-body tests take the
    method they document (the next one defined) as their origin."""
    cases: list[TestCase] = []
    for defn in defns:
        if isinstance(defn, CheckDefn):
            cases.append(_case_from(defn, TestOrigin()))
        elif isinstance(defn, ClassDefn):
            pending: list[CheckDefn] = []
            last_method: str | None = None
            for item in defn.body:
                if isinstance(item, CheckDefn):
                    pending.append(item)
                elif isinstance(item, MethodDefn):
                    for check in pending:
                        cases.append(_case_from(check, TestOrigin(defn.name, item.name)))
                    pending.clear()
                    last_method = item.name
            for check in pending:
                cases.append(_case_from(check, TestOrigin(defn.name, last_method)))
    return cases


def value_equal(a: Value, b: Value) -> bool:
    """Structural equality: numbers compare numerically across exactness,
    objects by class and fields, scenes by structure.  Functions cannot
    be compared."""
    if isinstance(a, (Closure, Primitive)) or isinstance(b, (Closure, Primitive)):
        raise EvalError("cannot compare functions")
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if numeric.is_number(a) or numeric.is_number(b):
        return numeric.is_number(a) and numeric.is_number(b) and a == b
    if isinstance(a, str) or isinstance(b, str):
        return isinstance(a, str) and isinstance(b, str) and a == b
    if isinstance(a, EmptyList) or isinstance(b, EmptyList):
        return isinstance(a, EmptyList) and isinstance(b, EmptyList)
    if isinstance(a, Cons) or isinstance(b, Cons):
        return (isinstance(a, Cons) and isinstance(b, Cons)
                and value_equal(a.first, b.first) and value_equal(a.rest, b.rest))
    if isinstance(a, ObjectValue) or isinstance(b, ObjectValue):
        return (isinstance(a, ObjectValue) and isinstance(b, ObjectValue)
                and a.class_name == b.class_name
                and len(a.field_values) == len(b.field_values)
                and all(value_equal(x, y)
                        for x, y in zip(a.field_values, b.field_values)))
    if is_scene(a) or is_scene(b):
        return _scene_equal(a, b)
    raise EvalError(f"cannot compare {render_value(a)} and {render_value(b)}")


def _scene_equal(a, b) -> bool:
    if isinstance(a, EmptyScene) and isinstance(b, EmptyScene):
        return a.width == b.width and a.height == b.height
    if isinstance(a, Circle) and isinstance(b, Circle):
        return a.radius == b.radius and a.mode == b.mode and a.color == b.color
    if isinstance(a, PlaceImage) and isinstance(b, PlaceImage):
        return (_scene_equal(a.image, b.image) and a.x == b.x and a.y == b.y
                and _scene_equal(a.scene, b.scene))
    return False


def run_tests(cases: list[TestCase], interp) -> TestReport:
    """Evaluate every collected test against the loaded program."""
    report = TestReport()
    env = interp.global_env
    for case in cases:
        report.total += 1
        try:
            actual = interp.eval(case.actual, env)
            expected = interp.eval(case.expected, env)
            if case.tolerance is None:
                if value_equal(actual, expected):
                    report.passed += 1
                else:
                    report.failures.append(Failure(
                        case.pos, "check-expect: actual value differs from the expected value",
                        render_value(actual), render_value(expected)))
            else:
                tolerance = interp.eval(case.tolerance, env)
                if not (numeric.is_number(actual) and numeric.is_number(expected)):
                    report.failures.append(Failure(
                        case.pos, "check-within: expected numeric actual and expected values",
                        render_value(actual), render_value(expected)))
                elif not numeric.is_number(tolerance) or tolerance < 0:
                    report.failures.append(Failure(
                        case.pos, "check-within: tolerance must be a non-negative number",
                        render_value(actual), render_value(expected)))
                elif abs(actual - expected) <= tolerance:
                    report.passed += 1
                else:
                    report.failures.append(Failure(
                        case.pos,
                        f"check-within: actual value is not within"
                        f" {numeric.render_number(tolerance)} of the expected value",
                        render_value(actual), render_value(expected)))
        except ClasslangError as exc:
            report.failures.append(Failure(case.pos, f"test raised an error: {exc.message}"))
        except RecursionError:
            report.failures.append(Failure(case.pos, "test raised an error: recursion too deep"))
    return report
