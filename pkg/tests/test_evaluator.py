from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from aperycmzv.cov import PHI
from aperycmzv.evaluator import (InadmissibleIndex, dirichlet_beta, eta,
                                 mpl_sum, omega_word_integral, x_word_integral)
from aperycmzv.gaussian import GaussianRational, I, MINUS_I, MINUS_ONE, ONE
from aperycmzv.hp import working_digits
from aperycmzv.series import parse_spec, t_star_direct
from aperycmzv.words import A, X1, XI, XM1, XMI


def test_march_pi2_over_8():
    w1img = PHI["w1"]
    with working_digits(45):
        v = x_word_integral((w1img, w1img), 0, 30)
        assert abs(v.value.real - gmpy2.const_pi() ** 2 / 8) < 1e-28
        assert v.value.imag == 0 or abs(v.value.imag) < 1e-28


def test_march_catalan_word():
    with working_digits(45):
        v = x_word_integral((PHI["w1"], PHI["w3"]), 0, 30)
        assert abs(v.value.real - 2 * gmpy2.const_catalan()) < 1e-28


def test_march_tstar_families():
    # t*(2_d) = (2/pi) * int_0^1 w3^(2d) w1; after the change of variables the
    # word has only d(-1,1) letters behind the lead, and the value matches
    # the direct multiple t-star sum (and hence (4/pi) beta(2d+1))
    from aperycmzv.cov import word_to_x_alphabet
    from aperycmzv.words import W1, W3
    d = 3
    sign, xword = word_to_x_alphabet((W3,) * (2 * d) + (W1,))
    assert {l.name for l in xword[1:]} == {"d(-1,1)"}
    with working_digits(40):
        v = x_word_integral(xword, 0, 25)
        val = sign.to_mpc() * v.value * 2 / gmpy2.const_pi()
        t = t_star_direct((2,) * d, 25)
        assert abs(val.real - t.value) < 1e-20
        assert abs(val.real - 4 / gmpy2.const_pi() * dirichlet_beta(2 * d + 1, 35)) < 1e-20


def test_march_interior_x1_letter():
    # int_0^1 x_-i x_1 ... interior pole at 1 integrable: check against sums
    w = (XMI, X1)
    from aperycmzv.words import word_to_li
    s, z = word_to_li(w)
    with working_digits(40):
        li = mpl_sum(s, z, 22)
        mv = x_word_integral(w, 0, 22)
        assert abs(li.value - mv.value) < 1e-18


def test_march_error_estimate_honest():
    with working_digits(45):
        v = x_word_integral((PHI["w1"], PHI["w3"]), 0, 22, check=True)
        truth = 2 * gmpy2.const_catalan()
        assert abs(v.value.real - truth) <= max(v.err, 1e-20)


def test_mpl_li2_cross_engine():
    with working_digits(40):
        li = mpl_sum((2,), (MINUS_I,), 25)
        mv = x_word_integral((A, XI), 0, 25)
        assert abs(li.value - mv.value) < 1e-22


@pytest.mark.parametrize("d", [1, 2])
def test_mpl_li_2d_at_i(d):
    with working_digits(40):
        li = mpl_sum((2 * d,), (I,), 30)
        assert abs(2 * li.value.imag - 2 * dirichlet_beta(2 * d, 35)) < 1e-25


def test_mpl_refusals():
    with pytest.raises(InadmissibleIndex):
        mpl_sum((1,), (ONE,), 20)
    with pytest.raises(InadmissibleIndex):
        mpl_sum((1,), (I,), 20, mode="truncate")
    # auto mode resolves the same index by acceleration
    with working_digits(40):
        v = mpl_sum((1,), (I,), 25)
        # Li_1(i) = -log(1-i)
        target = -gmpy2.log(gmpy2.mpc(1, -1))
        assert abs(v.value - target) < 1e-20


def test_mpl_geometric_argument():
    with working_digits(40):
        half = GaussianRational(Fraction(1, 2))
        v = mpl_sum((2,), (half,), 30)
        pi = gmpy2.const_pi()
        l2 = gmpy2.log(mpfr(2))
        assert abs(v.value.real - (pi * pi / 12 - l2 * l2 / 2)) < 1e-27


def test_mpl_depth2_mixed():
    # Li_{1,1}(i,-i) + Li_{1,1}(-i,-i) has imaginary part G
    with working_digits(45):
        a = mpl_sum((1, 1), (I, MINUS_I), 22)
        b = mpl_sum((1, 1), (MINUS_I, MINUS_I), 22)
        assert abs((a.value + b.value).imag - gmpy2.const_catalan()) < 1e-18


def test_cvz_beta_and_eta():
    with working_digits(50):
        assert abs(dirichlet_beta(2, 45) - gmpy2.const_catalan()) < 1e-43
        assert abs(eta(1, 40) - gmpy2.log(mpfr(2))) < 1e-38
        pi = gmpy2.const_pi()
        assert abs(dirichlet_beta(3, 40) - pi ** 3 / 32) < 1e-38


def test_theta_march_matches_x_march_on_native_word():
    # native chi-middle word with w5: theta and u marches agree at x=1
    from aperycmzv.words import W1, W3, W5
    word = (W3, W1, W5, W3, W1)
    from aperycmzv.cov import word_to_x_alphabet
    with working_digits(40):
        a = omega_word_integral(word, 1, 22)
        sign, xword = word_to_x_alphabet(word)
        b = x_word_integral(xword, 0, 22)
        assert abs(a.value - sign.to_mpc() * b.value) < 1e-18


def test_precision_scaling_march():
    word = (PHI["w1"], PHI["w0"], PHI["w3"])
    with working_digits(60):
        v1 = x_word_integral(word, 0, 20)
        v2 = x_word_integral(word, 0, 44)
        assert abs(v1.value - v2.value) <= max(v1.err, 1e-18)
