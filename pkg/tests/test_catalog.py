from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from aperycmzv.catalog import (UnknownConstant, catalog_names, constant,
                               find_relation)
from aperycmzv.hp import working_digits


def test_zeta2_smoke():
    with working_digits(45):
        v = constant("zeta2", 40)
        assert abs(v.value - gmpy2.const_pi() ** 2 / 6) < 1e-38


def test_catalan_against_builtin():
    with working_digits(50):
        v = constant("G", 45)
        assert abs(v.value - gmpy2.const_catalan()) < 1e-42


def test_w5_value():
    with working_digits(40):
        v = constant("w5", 25)
        assert abs(v.value - mpfr("0.04433915814")) < 1e-10


def test_recompute_at_higher_precision_agrees():
    for name in ("G", "beta4", "li4_half", "im_li3_1pi_half", "zeta_b5_1"):
        with working_digits(60):
            lo = constant(name, 18)
            hi = constant(name, 36)
            assert abs(lo.value - hi.value) < 1e-16, name


def test_unknown_name():
    with pytest.raises(UnknownConstant):
        constant("nope", 20)
    assert "G" in catalog_names()


def test_find_relation_pi2_over_8():
    with working_digits(50):
        value = gmpy2.const_pi() ** 2 / 8
    rel = find_relation(value, ["pi2"], digits=30)
    assert rel["value_coeff"] == -8 and rel["coeffs"] == {"pi2": 1}


def test_find_relation_two_g():
    with working_digits(50):
        value = 2 * gmpy2.const_catalan()
    rel = find_relation(value, ["G"], digits=30)
    assert rel["value_coeff"] == -1 and rel["coeffs"] == {"G": 2}


def test_find_relation_none_for_random():
    with working_digits(60):
        value = gmpy2.exp(mpfr("0.87654321"))
    rel = find_relation(value, ["zeta3", "G"], digits=40, max_coeff=10 ** 6)
    assert rel is None


def test_find_relation_precision_guard():
    with pytest.raises(ValueError):
        find_relation(mpfr(1), ["zeta3", "G"], digits=12)
