from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from aperycmzv.compiler import PrefactoredIntegral, compile_spec
from aperycmzv.cov import (InadmissibleWord, PHI, admissible_check,
                           lambda_lower_limit, to_x_alphabet,
                           word_to_x_alphabet)
from aperycmzv.gaussian import GaussianRational, I, MINUS_I, ONE
from aperycmzv.hp import working_digits
from aperycmzv.series import parse_spec
from aperycmzv.words import (A, W0, W1, W2, W3, W5, W8, W20, WDT, X1, XI, XM1,
                             XMI, CompositeLetter, expand_word, parts_of,
                             word_str)

OMEGA_TAGS = (W0, W1, W2, W3, W5, W8, W20, WDT)


def pullback_exact(tag: str, u: Fraction) -> GaussianRational:
    """Integrand of omega_tag after t = (1-u^2)/(1+u^2), exactly in Q[i].

    With t = (1-u^2)/(1+u^2):  dt/du = -4u/(1+u^2)^2 and
    sqrt(1-t^2) = 2u/(1+u^2), so every pull-back is rational in u.
    """
    t = (1 - u * u) / (1 + u * u)
    dt = Fraction(-4) * u / (1 + u * u) ** 2
    root = 2 * u / (1 + u * u)  # sqrt(1-t^2)
    table = {
        W0: dt / t,
        W1: dt / root,
        W2: t * dt / (1 - t * t),
        W3: dt / (t * root),
        W5: t * dt / root,
        W8: dt / (1 - t * t),
        W20: dt / (t * (1 - t * t)),
        WDT: dt,
    }
    return GaussianRational(table[tag])


def image_exact(tag: str, u: Fraction) -> GaussianRational:
    total = GaussianRational()
    for coeff, mono in parts_of(PHI[tag]):
        if mono.kind == "a":
            val = GaussianRational(Fraction(1)) / GaussianRational(u)
        elif mono.kind == "x":
            val = GaussianRational(Fraction(1)) / (mono.pole - u)
        else:
            d = mono.pole - u
            val = GaussianRational(Fraction(1)) / (d * d)
        total = total + coeff * val
    return total


@pytest.mark.parametrize("tag", OMEGA_TAGS)
@pytest.mark.parametrize("u", [Fraction(1, 5), Fraction(1, 2)])
def test_letter_images_pointwise_exact(tag, u):
    assert pullback_exact(tag, u) == image_exact(tag, u)


def test_lambda_limits():
    with working_digits(30):
        assert lambda_lower_limit(mpfr(1)) == 0
        a = lambda_lower_limit(mpfr(1) / 2)
        b = lambda_lower_limit(mpfr(3) / 4)
        assert a > b > 0  # strictly decreasing


def test_catalan_family_image():
    # (f3, w0^m w3 w1) -> i(-1)^m (x_i - x_-i)(x_1 - x_-1) y~^m
    for m in (0, 1, 2):
        sign, word = word_to_x_alphabet((W0,) * m + (W3, W1))
        assert sign == GaussianRational.of((-1) ** m)
        assert word[0].name == "i*d(-i,i)"
        assert word[1].name == "d(-1,1)"
        assert all(l.name == "y~" for l in word[2:])
        assert len(word) == m + 2


def test_seven_zeta3_image():
    sign, word = word_to_x_alphabet((W1, W20, W1))
    assert sign == GaussianRational.of(-1)
    assert [l.name for l in word] == ["i*d(-i,i)", "y~+z~", "i*d(-i,i)"]


def test_empty_word():
    sign, word = word_to_x_alphabet(())
    assert sign == ONE and word == ()


def test_admissible_check_catalan():
    pi = compile_spec(parse_spec("o+:2 >= 0"))
    report = admissible_check(to_x_alphabet(pi))
    assert report == {"monomials": 4, "admissible": True}


def test_admissible_check_rejects():
    bad = CompositeLetter("x+1", ((ONE, X1),))
    from aperycmzv.cov import CovTerm
    term = CovTerm(ONE, "f1", (X1, XI))
    with pytest.raises(InadmissibleWord):
        admissible_check([term])


def test_double_reversal_identity():
    # reversal + letter map applied twice through the inverse returns the word
    from aperycmzv.words import reverse_with_sign
    w = (W3, W0, W1)
    s1, r1 = reverse_with_sign(w)
    s2, r2 = reverse_with_sign(r1)
    assert (s1 * s2, r2) == (1, w)


def test_catalan_monomials_match_paper_combination():
    pi = compile_spec(parse_spec("o+:2 >= 0"))
    ct = to_x_alphabet(pi)[0]
    monos = {(w, str(c)) for c, w in expand_word(ct.word)}
    # i * (x_-i - x_i)(x_-1 - x_1) expanded
    assert ((XMI, XM1), "1i") in monos
    assert ((XMI, X1), "-1i") in monos
    assert ((XI, XM1), "-1i") in monos
    assert ((XI, X1), "1i") in monos
