from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from aperycmzv.hp import (AccelerationError, DomainError, HPComplex, HPReal,
                          TailModel, accelerate, elementary,
                          geometric_checkpoints, solve_linear, working_digits)


def test_exp_log_inverse_pair():
    with working_digits(40):
        v = elementary("exp", elementary("log", mpfr(2)))
        assert abs(v.value - 2) < mpfr(10) ** -38


def test_asin_endpoint():
    with working_digits(40):
        v = elementary("asin", mpfr(1))
        assert abs(v.value - gmpy2.const_pi() / 2) < mpfr(10) ** -38


def test_sqrt_algebraic_identity():
    with working_digits(40):
        v = elementary("sqrt", 1 - mpfr(1) / 4)
        assert abs(v.value - gmpy2.sqrt(mpfr(3)) / 2) < mpfr(10) ** -38


def test_pow_and_domain_errors():
    with working_digits(30):
        v = elementary("pow", mpfr(2), mpfr(10))
        assert abs(v.value - 1024) < 1e-25
        with pytest.raises(DomainError):
            elementary("log", mpfr(0))
        with pytest.raises(DomainError):
            elementary("pow", mpfr(0), mpfr(-1))


def test_error_estimates_propagate():
    a = HPReal(mpfr(1), 1e-20)
    b = HPReal(mpfr(2), 1e-25)
    assert (a + b).err >= 1e-20
    assert (a * b).err >= 1e-20
    c = HPComplex(gmpy2.mpc(1, 1), 1e-18)
    assert (c * a).err >= 1e-18


def test_accelerate_catalan():
    # alternating partial sums of sum (-1)^k/(2k+1)^2 at N = 2^6..2^12;
    # reference from an independent high-N sum with the alternating-series
    # tail bound |R_N| <= a_{N+1}
    with working_digits(40):
        pts = [2 ** k for k in range(6, 13)]
        total = mpfr(0)
        samples = []
        for n in range(pts[-1] + 1):
            total += mpfr((-1) ** n) / mpfr(2 * n + 1) ** 2
            if n in pts:
                samples.append((n, total))
        # pair consecutive terms to make the tail one-signed and smooth
        paired = [(n, s + mpfr((-1) ** (n + 1)) / mpfr(2 * n + 3) ** 2 / 2)
                  for n, s in samples]
        ref = mpfr(0)
        for n in range(200001):
            ref += mpfr((-1) ** n) / mpfr(2 * n + 1) ** 2
        bound = 1 / mpfr(2 * 200001 + 1) ** 2
        res = accelerate(paired, TailModel(e0=Fraction(3), powers=8))
        assert abs(res.value - ref) < max(float(bound), 1e-12)
        assert abs(res.value - gmpy2.const_catalan()) < 1e-12


def test_accelerate_zeta3():
    # partial sums of sum 1/n^3 at N = 1000 * 2^k, against a direct sum with
    # the integral tail bracket 1/(2(N+1)^2) < R_N < 1/(2 N^2)
    with working_digits(40):
        pts = [1000 * 2 ** k for k in range(7)]
        total = mpfr(0)
        samples = []
        ref_n = 50000
        ref = mpfr(0)
        for n in range(1, pts[-1] + 1):
            total += 1 / mpfr(n) ** 3
            if n == ref_n:
                ref = total + 1 / (2 * mpfr(n) ** 2) - 1 / (2 * mpfr(n) ** 3)
            if n in pts:
                samples.append((n, total))
        res = accelerate(samples, TailModel(e0=Fraction(2), powers=7))
        assert abs(res.value - ref) < 1e-10
        assert abs(res.value - gmpy2.zeta(mpfr(3))) < 1e-10


def test_accelerate_constant_sequence():
    with working_digits(30):
        samples = [(10 * 2 ** k, mpfr(42)) for k in range(6)]
        res = accelerate(samples, TailModel(e0=Fraction(1), powers=5))
        assert res.value == 42


def test_accelerate_geometric_partial_sums_within_estimate():
    with working_digits(40):
        r = mpfr(1) / 3
        samples = []
        for k in range(2, 9):
            n = 2 ** k
            samples.append((n, (1 - r ** n) / (1 - r)))
        # the geometric tail decays faster than any power, so a power model
        # must recover the limit within ~10x its own reported estimate
        res = accelerate(samples, TailModel(e0=Fraction(2), powers=6))
        assert float(abs(res.value - mpfr(3) / 2)) <= 10 * max(res.err, 1e-35)


def test_accelerate_needs_enough_samples():
    with pytest.raises(AccelerationError):
        accelerate([(10, mpfr(1)), (20, mpfr(1))], TailModel(e0=Fraction(1)))


def test_solve_linear_roundtrip():
    with working_digits(30):
        A = [[mpfr(2), mpfr(1)], [mpfr(1), mpfr(3)]]
        x = solve_linear(A, [mpfr(5), mpfr(10)])
        assert abs(A[0][0] * x[0] + A[0][1] * x[1] - 5) < 1e-25
        assert abs(A[1][0] * x[0] + A[1][1] * x[1] - 10) < 1e-25


def test_geometric_checkpoints_aligned():
    pts = geometric_checkpoints(100, 5)
    assert all(p % 4 == 0 for p in pts)
    assert sorted(set(pts)) == pts
