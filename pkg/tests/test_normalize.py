from fractions import Fraction

import gmpy2
import pytest

from aperycmzv.gaussian import GaussianRational
from aperycmzv.hp import from_fraction, working_digits
from aperycmzv.normalize import (LinearFormPair, RewriteError, SpecCombo,
                                 canonicalize, is_canonical, partial_fraction)
from aperycmzv.series import (E, OM, OP, STRICT, WEAK, SeriesSpec,
                              bruteforce_eval, oracle_eval, parse_spec)


def combo_bruteforce(combo, n_max, digits):
    with working_digits(digits):
        total = from_fraction(combo.constant.re)
        for t in combo.terms + combo.divergent:
            total += from_fraction(t.coeff.re) * bruteforce_eval(t.spec, n_max, digits)
        return total


# --- partial fractions --------------------------------------------------------


def check_pf_identity(pair):
    pieces = partial_fraction(pair)
    offs = {"e": 0, "o+": 1, "o-": -1}
    for n in range(1, 6):
        u = 2 * n + offs[pair.form_u]
        v = 2 * n + offs[pair.form_v]
        lhs = Fraction(1, u ** pair.s * v ** pair.t)
        rhs = Fraction(0)
        for coeff, form, exp in pieces:
            assert coeff.is_rational()
            rhs += coeff.re * Fraction(1, (2 * n + offs[form]) ** exp)
        assert lhs == rhs, (pair, n)


def test_pf_om_e_1_2():
    pair = LinearFormPair(OM, 1, E, 2)
    pieces = {(f, e): c.re for c, f, e in partial_fraction(pair)}
    # 1/(U V^2) = 1/U - 1/V - 1/V^2 for V = U + 1
    assert pieces == {(OM, 1): Fraction(1), (E, 1): Fraction(-1),
                      (E, 2): Fraction(-1)}
    check_pf_identity(pair)


def test_pf_om_op_1_1():
    pair = LinearFormPair(OM, 1, OP, 1)
    pieces = {(f, e): c.re for c, f, e in partial_fraction(pair)}
    assert pieces == {(OM, 1): Fraction(1, 2), (OP, 1): Fraction(-1, 2)}
    check_pf_identity(pair)


def test_pf_e_op_1_1():
    pair = LinearFormPair(E, 1, OP, 1)
    pieces = {(f, e): c.re for c, f, e in partial_fraction(pair)}
    assert pieces == {(E, 1): Fraction(1), (OP, 1): Fraction(-1)}
    check_pf_identity(pair)


@pytest.mark.parametrize("s,t", [(1, 1), (2, 1), (1, 3), (2, 2), (3, 2)])
def test_pf_exactness_various(s, t):
    check_pf_identity(LinearFormPair(E, s, OM, t))
    check_pf_identity(LinearFormPair(OP, s, OM, t))


def test_pf_rejects_identical_forms():
    with pytest.raises(ValueError):
        LinearFormPair(E, 1, E, 2)


# --- canonicalize --------------------------------------------------------------


def test_canonical_passthrough():
    spec = parse_spec("o+:2 >= 0")
    combo = canonicalize(spec)
    assert len(combo.terms) == 1
    assert combo.terms[0].spec == spec
    assert combo.terms[0].coeff == GaussianRational.of(1)
    assert not combo.contains_divergent_piece
    assert is_canonical(spec)


def test_example_s_structure():
    combo = canonicalize(parse_spec("n:2 >= o+:1 >= o-:1 > 0"))
    dsls = {(t.spec.to_dsl(), str(t.coeff)) for t in combo.terms}
    # the strict-head family, after shifting the o- index
    assert ("e:2 > o+:1 >= o+:1 >= 0", "4") in dsls
    assert ("e:2 > o+:2 >= 0", "-4") in dsls
    assert combo.contains_divergent_piece
    assert all(t.origin == 1 for t in combo.divergent)
    # divergent pieces carry exponent-1 heads only
    assert {t.spec.factors[0][1] for t in combo.divergent} == {1}
    # main lineage = the n1 > n2 sub-series (strict junction 1)
    mains = [t for t in combo.terms if t.origin == 0]
    assert {t.spec.to_dsl() for t in mains} == {
        "e:2 > o+:1 >= o+:1 >= 0", "e:2 > o+:2 >= 0"}


def test_sigma_chi_weight_drop():
    # e:2 > o-:1 > 0 rewrites into the 7zeta(3) family plus a bundle whose
    # exponent-1 pieces cancel to -x int w3 w1
    combo = canonicalize(parse_spec("e:2 > o-:1 > 0"))
    assert {t.spec.to_dsl() for t in combo.terms} == {
        "e:2 > o+:1 >= 0", "e:2 > 0"}
    assert {t.spec.to_dsl() for t in combo.divergent} == {
        "e:1 > 0", "o-:1 > 0"}


def test_final_junction_constant():
    combo = canonicalize(parse_spec("o+:2 > 0"))
    assert combo.constant == GaussianRational.of(-1)
    assert [t.spec.to_dsl() for t in combo.terms] == ["o+:2 >= 0"]


def test_om_shift_clean():
    combo = canonicalize(parse_spec("e:2 >= o-:1 > 0", x2=Fraction(9, 16)))
    assert {t.spec.to_dsl() for t in combo.terms} >= {"e:2 > o+:1 >= 0"}


def test_numeric_preservation_spotchecks():
    with working_digits(45):
        for dsl in ["n:2 >= o+:1 >= o-:1 > 0", "o-:2 > o-:1 > 0",
                    "o+:1 >= o-:2 > e:1 > 0", "e:2 >= o-:1 > 0",
                    "o+:2 > e:1 > o+:1 >= 0"]:
            spec = parse_spec(dsl, x2=Fraction(9, 16))
            combo = canonicalize(spec)
            lhs = bruteforce_eval(spec, 200, 45)
            rhs = combo_bruteforce(combo, 200, 45)
            assert abs(lhs - rhs) < 1e-35, dsl


def test_parity_safety_no_om_middles():
    import random
    rng = random.Random(5)
    for _ in range(40):
        depth = rng.randint(1, 3)
        while True:
            factors = tuple((rng.choice([E, OP, OM, "n"]), rng.randint(1, 3))
                            for _ in range(depth))
            junctions = tuple(rng.choice([STRICT, WEAK]) for _ in range(depth))
            spec = SeriesSpec(factors, junctions, 1, Fraction(9, 16))
            from aperycmzv.series import validate
            if not validate(spec):
                break
        combo = canonicalize(spec)
        for t in combo.terms + combo.divergent:
            assert all(f != OM for f, _ in t.spec.factors[1:]), t.spec


def test_depth_never_increases():
    spec = parse_spec("o+:2 >= o-:2 > e:1 > 0", x2=Fraction(9, 16))
    combo = canonicalize(spec)
    for t in combo.terms + combo.divergent:
        assert t.spec.depth <= spec.depth


def test_squared_product_terms():
    # b^2 head merges keep the product form instead of splitting into
    # individually divergent pieces
    spec = parse_spec("o+:3 > e:1 > 0", binom_power=2)
    combo = canonicalize(spec)
    assert combo.product_terms
    pt = combo.product_terms[0]
    assert {f for f, _ in pt.head_factors} == {E, OP}
    # and the numeric identity still holds via direct summation
    from aperycmzv.series import oracle_eval_general
    with working_digits(40):
        lhs = oracle_eval(spec, 22).value
        rhs = from_fraction(combo.constant.re)
        for t in combo.terms:
            rhs += from_fraction(t.coeff.re) * oracle_eval(t.spec, 22).value
        for p in combo.product_terms:
            rhs += from_fraction(p.coeff.re) * oracle_eval_general(
                p.idx_factors(), p.junctions, p.x2, p.binom_power, 22).value
        assert abs(lhs - rhs) < 1e-18
