from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from classlang.errors import LevelError, LexError, ParseError
from classlang.nodes import (
    App,
    CheckDefn,
    ClassDefn,
    New,
    Num,
    Send,
    This,
    TopExpr,
    Var,
)
from classlang.reader import (
    parse_expr_source,
    parse_program,
    parse_source,
    strip_lang_header,
    tokenize,
    unparse_expr,
)

from .conftest import CORPUS_PROGRAMS, corpus_source, iter_program_exprs


class TestTokenize:
    def test_new_posn(self):
        kinds = [t.kind for t in tokenize("(new posn 3 4)")]
        assert kinds == ["lparen", "identifier", "identifier", "number", "number", "rparen"]

    def test_empty_input(self):
        assert tokenize("") == []

    def test_fraction_is_one_token(self):
        tokens = tokenize("1/3")
        assert len(tokens) == 1
        assert tokens[0].kind == "number"
        assert tokens[0].value == Fraction(1, 3)

    def test_decimal_is_exact(self):
        (tok,) = tokenize("1.5")
        assert tok.kind == "number"
        assert tok.value == Fraction(3, 2)

    def test_dot_splits_atoms(self):
        # Fig. 1 writes (this . right .sum) without a space after the dot
        kinds = [(t.kind, t.text) for t in tokenize(".sum")]
        assert kinds == [("dot", "."), ("identifier", "sum")]
        kinds = [(t.kind, t.text) for t in tokenize("x.m")]
        assert kinds == [("identifier", "x"), ("dot", "."), ("identifier", "m")]

    def test_booleans(self):
        assert [t.kind for t in tokenize("true false")] == ["boolean", "boolean"]

    def test_comments_dropped(self):
        assert [t.text for t in tokenize("1 ; two three\n4")] == ["1", "4"]

    def test_string_literal(self):
        (tok,) = tokenize('"solid"')
        assert tok.kind == "string"
        assert tok.value == "solid"

    def test_unterminated_string(self):
        with pytest.raises(LexError, match="unterminated") as exc_info:
            tokenize('\n  "oops')
        assert exc_info.value.line == 2
        assert exc_info.value.col == 3

    def test_zero_denominator_literal(self):
        with pytest.raises(LexError, match="zero denominator"):
            tokenize("1/0")

    def test_text_concatenation_reproduces_source(self):
        source = corpus_source("tree")
        _, body = strip_lang_header(source)
        joined = "".join(t.text for t in tokenize(body))
        stripped = "".join(
            line.split(";")[0] for line in body.splitlines())
        assert joined == "".join(stripped.split())

    def test_positions(self):
        tokens = tokenize("(a\n  b)")
        assert (tokens[2].pos.line, tokens[2].pos.col) == (2, 3)


class TestDesugar:
    def test_single_dot(self):
        assert parse_expr_source("(x . m)") == Send(Var("x"), "m", ())

    def test_chained_dots_left_associate(self):
        assert parse_expr_source("(x . m . n)") == Send(Send(Var("x"), "m", ()), "n", ())

    def test_dot_with_arguments(self):
        expected = Send(This(), "dist", (New("posn", (Num(Fraction(0)), Num(Fraction(0)))),))
        assert parse_expr_source("(this . dist (new posn 0 0))") == expected

    def test_tight_dot_matches_spaced_dot(self):
        assert parse_expr_source("(x . m)") == parse_expr_source("(x.m)")
        assert parse_expr_source("(this . right . sum)") == parse_expr_source(
            "(this . right .sum)")

    def test_empty_receiver(self):
        with pytest.raises(ParseError, match="receiver"):
            parse_expr_source("( . m)")

    def test_two_receiver_expressions(self):
        with pytest.raises(ParseError, match="exactly one expression"):
            parse_expr_source("(f x . m)")

    def test_segment_must_start_with_identifier(self):
        with pytest.raises(ParseError, match="message name"):
            parse_expr_source("(x . 5)")

    def test_trailing_dot(self):
        with pytest.raises(ParseError, match="message name"):
            parse_expr_source("(x . m .)")

    def test_mixing_send_and_dot(self):
        assert parse_expr_source("((send x m) . n)") == parse_expr_source("(x . m . n)")

    @given(st.integers(min_value=1, max_value=8))
    def test_chain_depth_nests_first_segment_innermost(self, depth):
        names = [f"m{i}" for i in range(depth)]
        source = "(x " + " ".join(f". {n}" for n in names) + ")"
        expr = parse_expr_source(source)
        # peel sends outermost-first: last message is outermost
        for name in reversed(names):
            assert isinstance(expr, Send)
            assert expr.message == name
            assert expr.args == ()
            expr = expr.receiver
        assert expr == Var("x")


class TestLevels:
    def test_dot_rejected_at_level_0(self):
        with pytest.raises(LevelError) as exc_info:
            parse_expr_source("(x . m)", level=0)
        assert exc_info.value.required_level == 1
        assert "class/1" in exc_info.value.message

    def test_super_rejected_below_level_2(self):
        source = "(define-class child (super parent) (fields x))"
        with pytest.raises(LevelError) as exc_info:
            parse_program(tokenize(source), 1)
        assert exc_info.value.required_level == 2
        assert "class/2" in exc_info.value.message
        parse_program(tokenize(source), 2)

    def test_constructor_rejected_below_level_4(self):
        source = "(define-class c (fields lo hi) (constructor (x) (fields x (sqr x))))"
        with pytest.raises(LevelError) as exc_info:
            parse_program(tokenize(source), 3)
        assert exc_info.value.required_level == 4
        assert "class/4" in exc_info.value.message
        parse_program(tokenize(source), 4)

    def test_level_0_and_4_agree_on_level_0_programs(self):
        source = """
        (define-class posn (fields x y))
        (check-expect (send (new posn 1 2) x) 1)
        (define (double n) (+ n n))
        """
        assert parse_program(tokenize(source), 0) == parse_program(tokenize(source), 4)

    def test_corpus_parses_identically_at_higher_levels(self):
        for name in CORPUS_PROGRAMS:
            _, body = strip_lang_header(corpus_source(name))
            tokens = tokenize(body)
            base = parse_program(tokens, 1)
            for level in (2, 3, 4):
                assert parse_program(tokens, level) == base


class TestParseForms:
    def test_define_class_fields(self):
        (defn,) = parse_program(tokenize("(define-class posn (fields x y))"), 0)
        assert isinstance(defn, ClassDefn)
        assert defn.name == "posn"
        assert defn.fields == ("x", "y")
        assert defn.super_name is None

    def test_check_expect_with_dot_actual(self):
        source = "(check-expect ((new posn 0 0) . dist-origin) 0)"
        (defn,) = parse_program(tokenize(source), 1)
        assert isinstance(defn, CheckDefn)
        assert isinstance(defn.actual, Send)
        assert defn.actual.message == "dist-origin"

    def test_require_is_dropped(self):
        defns = parse_program(tokenize("(require 2htdp/image class/universe) 1"), 1)
        assert len(defns) == 1
        assert isinstance(defns[0], TopExpr)

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError) as exc_info:
            parse_program(tokenize("(define (f x)"), 0)
        assert exc_info.value.line == 1

    def test_mismatched_bracket_kinds(self):
        with pytest.raises(ParseError, match="to close"):
            parse_program(tokenize("(cond [else 1)]"), 0)

    def test_square_brackets_in_cond(self):
        expr = parse_expr_source("(cond [(zero? n) 1] [else 2])")
        assert unparse_expr(expr) == "(cond [(zero? n) 1] [else 2])"

    def test_else_must_be_last(self):
        with pytest.raises(ParseError, match="else"):
            parse_expr_source("(cond [else 1] [(zero? n) 2])")

    def test_cond_with_no_clauses(self):
        with pytest.raises(ParseError, match="clause"):
            parse_expr_source("(cond)")

    def test_nested_define_rejected(self):
        with pytest.raises(ParseError, match="top level"):
            parse_expr_source("(f (define x 1))")

    def test_reserved_word_as_name(self):
        with pytest.raises(ParseError, match="keyword"):
            parse_program(tokenize("(define new 1)"), 0)

    def test_duplicate_parameter(self):
        with pytest.raises(ParseError, match="twice"):
            parse_program(tokenize("(define (f x x) x)"), 0)

    def test_big_bang_arity(self):
        with pytest.raises(ParseError, match="big-bang"):
            parse_program(tokenize("(big-bang)"), 1)

    def test_class_body_rejects_stray_forms(self):
        with pytest.raises(ParseError, match="define-class"):
            parse_program(tokenize("(define-class c (fields x) 42)"), 0)

    def test_empty_application_rejected(self):
        with pytest.raises(ParseError, match="expected a function"):
            parse_expr_source("()")


class TestLangHeader:
    def test_header_recognized(self):
        program = parse_source("#lang class/2\n(define-class a (fields x))")
        assert program.level == 2

    def test_flag_wins_over_header(self):
        program = parse_source("#lang class/2\n(define x 1)", level=0)
        assert program.level == 0

    def test_default_level_is_fallback(self):
        assert parse_source("(define x 1)").level == 1
        assert parse_source("(define x 1)", fallback_level=3).level == 3

    def test_unsupported_lang(self):
        with pytest.raises(ParseError, match="unsupported language"):
            parse_source("#lang bsl\n1")
        with pytest.raises(ParseError, match="unsupported language"):
            parse_source("#lang class/9\n1")

    def test_positions_survive_header_stripping(self):
        with pytest.raises(ParseError) as exc_info:
            parse_source("#lang class/1\n(define new 1)")
        assert exc_info.value.line == 2


class TestRoundTrip:
    def test_corpus_exprs_roundtrip(self):
        for name in CORPUS_PROGRAMS:
            program = parse_source(corpus_source(name))
            for expr in iter_program_exprs(program):
                assert parse_expr_source(unparse_expr(expr)) == expr

    def test_desugared_output_has_no_dots(self):
        program = parse_source(corpus_source("tree"))
        for expr in iter_program_exprs(program):
            assert " . " not in unparse_expr(expr)

    def test_app_roundtrip(self):
        expr = parse_expr_source('(f (lambda (x) (and true (or false (= x 1/3)))) "s")')
        assert parse_expr_source(unparse_expr(expr)) == expr
        assert isinstance(expr, App)
