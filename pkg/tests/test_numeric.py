import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from classlang import numeric
from classlang.errors import EvalError

F = Fraction


def oracle_add(an, ad, bn, bd):
    """Independent rational addition: integer cross-multiplication, then
    reduction by the gcd."""
    num = an * bd + bn * ad
    den = ad * bd
    g = math.gcd(abs(num), den)
    return num // g, den // g


rationals = st.fractions(
    min_value=F(-10**6), max_value=F(10**6), max_denominator=10**6)


class TestArithmetic:
    def test_third_plus_third_matches_cross_multiplication(self):
        assert oracle_add(1, 3, 1, 3) == (2, 3)
        result = numeric.add(F(1, 3), F(1, 3))
        assert result == F(2, 3)
        assert (result.numerator, result.denominator) == (2, 3)

    def test_additive_identity(self):
        assert numeric.add(F(5), F(0)) == F(5)

    def test_tree_sum_arithmetic(self):
        assert numeric.add(numeric.add(F(1), F(5)), F(10)) == F(16)

    @given(rationals, rationals)
    def test_add_matches_oracle(self, a, b):
        num, den = oracle_add(a.numerator, a.denominator, b.numerator, b.denominator)
        assert numeric.add(a, b) == F(num, den)

    @given(rationals, rationals)
    def test_add_and_mul_commute(self, a, b):
        assert numeric.add(a, b) == numeric.add(b, a)
        assert numeric.mul(a, b) == numeric.mul(b, a)

    @given(rationals, rationals, rationals)
    def test_add_and_mul_associate_exactly(self, a, b, c):
        assert numeric.add(numeric.add(a, b), c) == numeric.add(a, numeric.add(b, c))
        assert numeric.mul(numeric.mul(a, b), c) == numeric.mul(a, numeric.mul(b, c))

    @given(rationals, rationals)
    def test_results_are_in_lowest_terms(self, a, b):
        for op in (numeric.add, numeric.sub, numeric.mul):
            r = op(a, b)
            assert math.gcd(abs(r.numerator), r.denominator) == 1
            assert r.denominator > 0

    @given(rationals, rationals)
    def test_exact_closure(self, a, b):
        assert numeric.is_exact(numeric.add(a, b))
        assert numeric.is_exact(numeric.sub(a, b))
        assert numeric.is_exact(numeric.mul(a, b))
        if b != 0:
            assert numeric.is_exact(numeric.div(a, b))

    def test_inexact_contagion(self):
        assert isinstance(numeric.add(F(1, 3), 0.5), float)
        assert isinstance(numeric.mul(0.5, F(2)), float)
        assert isinstance(numeric.div(1.0, F(3)), float)

    def test_division_by_zero(self):
        with pytest.raises(EvalError, match="division by zero"):
            numeric.div(F(1), F(0))
        with pytest.raises(EvalError, match="division by zero"):
            numeric.div(F(1), 0.0)

    def test_non_number_rejected(self):
        with pytest.raises(EvalError):
            numeric.add(F(1), "2")
        with pytest.raises(EvalError):
            numeric.add(True, F(1))


class TestSqrt:
    def test_perfect_square_is_exact(self):
        assert numeric.sqrt(F(25)) == F(5)
        assert numeric.is_exact(numeric.sqrt(F(25)))

    def test_sqrt_zero(self):
        assert numeric.sqrt(F(0)) == F(0)

    def test_sqrt_two_is_host_float(self):
        assert numeric.sqrt(F(2)) == math.sqrt(2)
        assert numeric.sqrt(F(2)) == 1.4142135623730951

    def test_negative_rejected(self):
        with pytest.raises(EvalError, match="non-negative"):
            numeric.sqrt(F(-1))

    def test_rational_perfect_square(self):
        assert numeric.sqrt(F(9, 4)) == F(3, 2)

    @given(rationals)
    def test_sqrt_of_square_roundtrips(self, r):
        r = abs(r)
        assert numeric.sqrt(numeric.mul(r, r)) == r

    def test_inexact_sqrt(self):
        assert numeric.sqrt(4.0) == 2.0
        assert isinstance(numeric.sqrt(4.0), float)


class TestSmallOps:
    def test_add1(self):
        assert numeric.add1(F(10)) == F(11)

    def test_sub1(self):
        assert numeric.sub1(F(400)) == F(399)

    def test_zero_pred(self):
        assert numeric.is_zero(F(0)) is True
        assert numeric.is_zero(F(1, 3)) is False
        assert numeric.is_zero(0.0) is True

    def test_sqr(self):
        assert numeric.sqr(F(-3)) == F(9)


class TestTextual:
    def test_render_integer(self):
        assert numeric.render_number(F(5)) == "5"

    def test_render_fraction(self):
        assert numeric.render_number(F(1, 3)) == "1/3"
        assert numeric.render_number(F(-1, 3)) == "-1/3"

    def test_render_float(self):
        assert numeric.render_number(1.5) == "1.5"
        assert numeric.render_number(math.sqrt(2)) == "1.4142135623730951"

    def test_parse_literals(self):
        assert numeric.parse_number("1/3") == F(1, 3)
        assert numeric.parse_number("-7") == F(-7)
        assert numeric.parse_number("1.5") == F(3, 2)

    def test_zero_denominator_literal(self):
        with pytest.raises(ValueError, match="zero denominator"):
            numeric.parse_number("1/0")

    def test_one_third_roundtrip(self):
        assert numeric.parse_number(numeric.render_number(F(1, 3))) == F(1, 3)

    @given(rationals)
    def test_render_parse_roundtrip(self, r):
        assert numeric.parse_number(numeric.render_number(r)) == r
