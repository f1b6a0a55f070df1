"""Reference constants and integer-relation detection.

Catalog entries are computed from defining series (nested sums, alternating
series via the Cohen-Villegas-Zagier scheme, geometric sums at 1/2) rather
than copied as decimal literals, so recomputation at higher precision is a
real consistency check.  ``find_relation`` wraps PSLQ with two guards: the
residual must clear 10^(4-digits), and the relation must survive
re-verification with every constant recomputed at +20 digits.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .gaussian import GaussianRational, I as G_I, MINUS_I, MINUS_ONE, ONE as G_ONE
from .hp import HPReal, working_digits
from .evaluator import dirichlet_beta, eta, mpl_sum

_HALF = GaussianRational(Fraction(1, 2))
_HALF_1PI = GaussianRational(Fraction(1, 2), Fraction(1, 2))  # (1+i)/2


class UnknownConstant(KeyError):
    pass


def _pi(d):
    return gmpy2.const_pi()


def _li_half(k):
    def f(d):
        return mpl_sum((k,), (_HALF,), d).value.real
    return f


def _im_li_half1pi(k):
    def f(d):
        return mpl_sum((k,), (_HALF_1PI,), d).value.imag
    return f


def _catalan(d):
    return dirichlet_beta(2, d)


def _beta(k):
    return lambda d: dirichlet_beta(k, d)


def _zeta(k):
    return lambda d: gmpy2.zeta(mpfr(k))


def _mpl(s, z, part):
    def f(d):
        v = mpl_sum(s, z, d).value
        return v.real if part == "re" else v.imag
    return f


def _w4(d):
    # weight-4 combination; the G*pi*log2 coefficient is 2, pinned by an
    # integer-relation run at 50 digits against the defining integral
    G = _catalan(d)
    pi = gmpy2.const_pi()
    l2 = gmpy2.log(mpfr(2))
    im3 = _im_li_half1pi(3)(d)
    li4h = _li_half(4)(d)
    return (-2 * G * G - mpfr(49) / 720 * pi ** 4 + 2 * pi * im3
            - mpfr(11) / 48 * pi ** 2 * l2 ** 2 + l2 ** 4 / 6
            + 2 * G * pi * l2 + 4 * li4h)


def _w5(d):
    pi = gmpy2.const_pi()
    l2 = gmpy2.log(mpfr(2))
    im3 = _im_li_half1pi(3)(d)
    im4 = _im_li_half1pi(4)(d)
    li4h, li5h = _li_half(4)(d), _li_half(5)(d)
    b4 = dirichlet_beta(4, d)
    reli311 = _mpl((3, 1, 1), (G_ONE, G_ONE, G_I), "re")(d)
    z3, z5 = gmpy2.zeta(mpfr(3)), gmpy2.zeta(mpfr(5))
    return (5 * l2 * li4h + 21 * li5h
            + pi * (16 * im4 - 17 * b4 + 8 * im3 * l2)
            + mpfr(379) / 2880 * pi ** 4 * l2 + l2 ** 5 / 30
            - 16 * reli311
            - pi ** 2 * (16 * l2 ** 3 - 29 * z3) / 192
            - mpfr(27) / 4 * z5)


def _w6(d):
    G = _catalan(d)
    pi = gmpy2.const_pi()
    l2 = gmpy2.log(mpfr(2))
    b4 = dirichlet_beta(4, d)
    li4h, li5h, li6h = _li_half(4)(d), _li_half(5)(d), _li_half(6)(d)
    im4, im5 = _im_li_half1pi(4)(d), _im_li_half1pi(5)(d)
    z3, z5 = gmpy2.zeta(mpfr(3)), gmpy2.zeta(mpfr(5))
    imli41_p = _mpl((4, 1), (G_I, G_ONE), "im")(d)
    imli41_m = _mpl((4, 1), (G_I, MINUS_ONE), "im")(d)
    zb51 = _mpl((5, 1), (MINUS_ONE, G_ONE), "re")(d)
    reli42 = _mpl((4, 2), (MINUS_ONE, G_I), "re")(d)
    reli3111 = _mpl((3, 1, 1, 1), (G_ONE, G_ONE, G_ONE, G_I), "re")(d)
    return (68 * li6h - mpfr(7655) / 27648 * pi ** 6
            + mpfr(61) / 2 * pi * imli41_p - mpfr(41) / 2 * pi * imli41_m
            + 96 * pi * im5 - 19 * pi * b4 * l2 + 32 * pi * im4 * l2
            - mpfr(181) / 2880 * pi ** 4 * l2 ** 2 - pi ** 2 * l2 ** 4 / 96
            + l2 ** 6 / 90 - mpfr(169) / 4 * zb51
            - mpfr(5) / 12 * pi ** 2 * li4h + 10 * l2 * li5h
            - 24 * G * b4 - 6 * pi ** 2 * l2 * z3
            - 24 * reli42 + 64 * reli3111
            + mpfr(8195) / 128 * z3 ** 2 + mpfr(2821) / 32 * l2 * z5)


_CATALOG = {
    "one": lambda d: mpfr(1),
    "pi": _pi,
    "pi2": lambda d: gmpy2.const_pi() ** 2,
    "pi3": lambda d: gmpy2.const_pi() ** 3,
    "log2": lambda d: gmpy2.log(mpfr(2)),
    "zeta2": lambda d: gmpy2.const_pi() ** 2 / 6,
    "zeta3": _zeta(3),
    "zeta5": _zeta(5),
    "G": _catalan,
    "G2": lambda d: _catalan(d) ** 2,
    "beta2": _beta(2),
    "beta3": _beta(3),
    "beta4": _beta(4),
    "beta5": _beta(5),
    "beta6": _beta(6),
    "beta7": _beta(7),
    "li2_half": _li_half(2),
    "li3_half": _li_half(3),
    "li4_half": _li_half(4),
    "li5_half": _li_half(5),
    "li6_half": _li_half(6),
    "im_li3_1pi_half": _im_li_half1pi(3),
    "im_li4_1pi_half": _im_li_half1pi(4),
    "im_li5_1pi_half": _im_li_half1pi(5),
    "im_li41_i_p1": _mpl((4, 1), (G_I, G_ONE), "im"),
    "im_li41_i_m1": _mpl((4, 1), (G_I, MINUS_ONE), "im"),
    "re_li311_11i": _mpl((3, 1, 1), (G_ONE, G_ONE, G_I), "re"),
    "re_li42_m1_i": _mpl((4, 2), (MINUS_ONE, G_I), "re"),
    "re_li3111_111i": _mpl((3, 1, 1, 1), (G_ONE, G_ONE, G_ONE, G_I), "re"),
    "zeta_b5_1": _mpl((5, 1), (MINUS_ONE, G_ONE), "re"),
    "w4": _w4,
    "w5": _w5,
    "w6": _w6,
}

_cache: dict = {}


def catalog_names():
    return sorted(_CATALOG)


def constant(name: str, digits: int = 40) -> HPReal:
    """Catalog constant to the requested number of digits (cached)."""
    if name not in _CATALOG:
        raise UnknownConstant(name)
    got = _cache.get(name)
    if got is not None and got[0] >= digits:
        with working_digits(digits + 5):
            return HPReal(mpfr(got[1]), 10.0 ** (-got[0]))
    with working_digits(digits + 10):
        val = _CATALOG[name](digits)
    _cache[name] = (digits, val)
    return HPReal(val, 10.0 ** (-digits))


class RelationNotFound(Exception):
    pass


def find_relation(value, basis: list, digits: int = 40, max_coeff: int = 10 ** 8):
    """Small integer relation c0*value + sum c_i * basis_i = 0, verified.

    ``value`` is an mpfr/HPReal at ``digits`` working digits; ``basis`` is a
    list of catalog names.  Requires digits >= 10 * (len(basis) + 1); returns
    {"value_coeff": c0, "coeffs": {...}, "residual": float} or None when PSLQ
    finds nothing below the height cap.  A candidate is accepted only if its
    residual clears 10^(4-digits) and re-verification with the constants at
    +20 digits stays within the value's own precision.
    """
    import mpmath

    if isinstance(value, HPReal):
        value = value.value
    if digits < 10 * len(basis):
        raise ValueError(f"need at least {10 * len(basis)} digits "
                         f"for a basis of size {len(basis)}")
    with working_digits(digits + 10):
        consts = [constant(name, digits + 5).value for name in basis]
        vec = [mpfr(value)] + consts
        mpmath.mp.dps = digits + 10
        rel = mpmath.pslq([mpmath.mpf(str(v)) for v in vec],
                          maxcoeff=max_coeff, maxsteps=20000)
        if rel is None or rel[0] == 0:
            return None
        resid = abs(sum(c * v for c, v in zip(rel, vec)))
        scale = max(abs(v) for v in vec)
        if float(resid / scale) > 10.0 ** (-digits + 4):
            return None
    # re-verify against higher-precision constants
    with working_digits(digits + 40):
        consts2 = [constant(name, digits + 25).value for name in basis]
        resid2 = abs(rel[0] * mpfr(value)
                     + sum(c * v for c, v in zip(rel[1:], consts2)))
        if float(resid2 / scale) > 10.0 ** (-digits + 5):
            return None
    if rel[0] > 0:
        rel = [-c for c in rel]
    return {
        "value_coeff": rel[0],
        "coeffs": {name: c for name, c in zip(basis, rel[1:])},
        "residual": float(resid / scale),
    }
