from __future__ import annotations

from pathlib import Path

import pytest

from classlang.evaluator import ProgramResult, eval_program
from classlang.nodes import (
    BigBangDefn,
    CheckDefn,
    ClassDefn,
    ConstantDefn,
    FunctionDefn,
    Program,
    TopExpr,
)
from classlang.reader import parse_source

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

CORPUS_PROGRAMS = ("posn", "tree", "world", "rocket")


def corpus_source(name: str) -> str:
    return (CORPUS / f"{name}.rkt").read_text()


def load_corpus(name: str) -> ProgramResult:
    return eval_program(parse_source(corpus_source(name)))


def iter_program_exprs(program: Program):
    """Every expression root in a parsed program, in source order."""
    for defn in program.defns:
        if isinstance(defn, FunctionDefn):
            yield defn.body
        elif isinstance(defn, ConstantDefn):
            yield defn.expr
        elif isinstance(defn, CheckDefn):
            yield defn.actual
            yield defn.expected
            if defn.tolerance is not None:
                yield defn.tolerance
        elif isinstance(defn, (TopExpr, BigBangDefn)):
            yield defn.expr
        elif isinstance(defn, ClassDefn):
            for item in defn.body:
                if isinstance(item, CheckDefn):
                    yield item.actual
                    yield item.expected
                    if item.tolerance is not None:
                        yield item.tolerance
                else:
                    yield item.body
            if defn.constructor is not None:
                yield from defn.constructor.field_exprs


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS
