from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from aperycmzv.catalog import constant
from aperycmzv.gaussian import GaussianRational, I, MINUS_I
from aperycmzv.hp import working_digits
from aperycmzv.pipeline import (EvaluationError, cmzv_expression,
                                evaluate_series)
from aperycmzv.series import oracle_eval, parse_spec


def test_catalan_both_engines():
    with working_digits(45):
        r = evaluate_series(parse_spec("o+:2 >= 0"), 25, engine="both")
        assert abs(r.value.real - 2 * gmpy2.const_catalan()) < 1e-20


def test_seven_zeta3_both_engines():
    with working_digits(45):
        r = evaluate_series(parse_spec("n:2 > o+:1 >= 0"), 22, engine="both")
        assert abs(r.value.real - 7 * gmpy2.zeta(mpfr(3))) < 1e-18


def test_cmzv_expression_catalan():
    expr = cmzv_expression(parse_spec("o+:2 >= 0"))
    as_map = {(s, z): c for c, s, z in expr}
    # i (Li(-i,i) - Li(-i,-i) - Li(i,-i) + Li(i,i)), all depth (1,1)
    assert as_map[((1, 1), (MINUS_I, I))] == I
    assert as_map[((1, 1), (MINUS_I, MINUS_I))] == -I
    assert as_map[((1, 1), (I, MINUS_I))] == -I
    assert as_map[((1, 1), (I, I))] == I
    assert len(expr) == 4


def test_cmzv_requires_x_equal_one():
    with pytest.raises(EvaluationError):
        cmzv_expression(parse_spec("o+:2 >= 0", x2=Fraction(1, 4)))


def test_parts_split_example_s():
    r = evaluate_series(parse_spec("n:2 >= o+:1 >= o-:1 > 0"), 30)
    with working_digits(60):
        G = gmpy2.const_catalan()
        z3 = gmpy2.zeta(mpfr(3))
        assert abs(r.parts["main"].value.real - 8 * G * G) < 1e-20
        assert abs(r.parts["head_diagonal"].value.real - (7 * z3 - 8 * G)) < 1e-10
        assert abs(r.value.real - (8 * G * G + 7 * z3 - 8 * G)) < 1e-10
        assert r.combo.contains_divergent_piece


def test_bundle_limit_known_value():
    # the sigma-chi bundle collapses to -x int_0^x w3 w1 -> -2G
    r = evaluate_series(parse_spec("e:2 > o-:1 > 0"), 30)
    with working_digits(60):
        G = gmpy2.const_catalan()
        assert abs(r.parts["bundle_limit"].value.real + 2 * G) < 1e-12


def test_pipeline_matches_oracle_under_x1():
    with working_digits(45):
        for dsl, x2 in [("o+:2 >= o-:1 > 0", Fraction(9, 16)),
                        ("e:2 > o+:1 >= 0", Fraction(1, 4)),
                        ("o-:2 > 0", Fraction(1, 2))]:
            spec = parse_spec(dsl, x2=x2)
            r = evaluate_series(spec, 25)
            v = oracle_eval(spec, 25)
            assert abs(r.value.real - v.value) < 1e-18, dsl


def test_squared_pipeline_value():
    r = evaluate_series(parse_spec("o+:4 >= e:1 > 0", binom_power=2), 25)
    with working_digits(45):
        assert abs(r.value.real - constant("w5", 25).value) < 1e-20


def test_squared_product_route():
    # head merge keeps a product term; value still matches the direct oracle
    spec = parse_spec("o+:3 > e:1 > 0", binom_power=2)
    r = evaluate_series(spec, 22)
    v = oracle_eval(spec, 22)
    with working_digits(40):
        assert abs(r.value.real - v.value) < 1e-15
    assert r.combo.product_terms


def test_invalid_spec_raises():
    with pytest.raises(ValueError):
        evaluate_series(parse_spec("o-:2 >= 0"), 20)


def test_imaginary_part_stays_zero():
    r = evaluate_series(parse_spec("o-:2 > o+:1 >= 0"), 25)
    assert abs(float(r.value.imag)) < 1e-20
