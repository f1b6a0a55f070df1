"""Golden and property check registry, shared by the CLI selftest and pytest.

Each check is a named callable returning (ok, detail).  Tolerances follow the
acceptance list and sit far above the engines' estimated errors.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .catalog import constant, find_relation
from .compiler import compile_spec, compile_squared, word_length_bounds
from .cov import admissible_check, to_x_alphabet
from .evaluator import (dirichlet_beta, mpl_sum, omega_word_integral,
                        x_word_integral)
from .gaussian import GaussianRational, I as G_I
from .hp import working_digits, from_fraction
from .normalize import canonicalize, is_canonical
from .pipeline import evaluate_series
from .series import (E, OM, OP, STRICT, WEAK, SeriesSpec, binomial_weight,
                     closed_form_tstar, interleave_chains,
                     interleaved_bruteforce, oracle_eval, parse_spec,
                     t_star_direct, validate)
from .words import (W0, W1, W5, expand_composites, is_admissible,
                    reg_decompose, reverse_with_sign, shuffle, word_to_li)


@dataclass
class CheckResult:
    name: str
    suite: str
    ok: bool
    detail: str
    seconds: float


def _spec(dsl, bp=1, x2=1):
    return parse_spec(dsl, binom_power=bp, x2=Fraction(x2))


def _close(value, target, tol):
    gap = abs(mpfr(value) - mpfr(target))
    return float(gap) <= tol, f"|gap|={float(gap):.2e} tol={tol:.0e}"


# ---------------------------------------------------------------------------
# golden checks (acceptance criteria 1-9, 11)


def check_apery_anchors():
    with working_digits(50):
        z2 = gmpy2.const_pi() ** 2 / 6
        z3 = gmpy2.zeta(mpfr(3))
        v2 = oracle_eval(_spec("n:2 > 0", x2=Fraction(1, 4)), 30)
        ok2, d2 = _close(v2.value, z2 / 3, 1e-12)
        v3 = oracle_eval(_spec("n:3 > 0", x2=Fraction(-1, 4)), 30)
        ok3, d3 = _close(-v3.value, 2 * z3 / 5, 1e-12)
    return ok2 and ok3, f"zeta(2)/3: {d2}; (2/5)zeta(3): {d3}"


def check_catalan_pipeline_and_oracle():
    with working_digits(50):
        G = constant("G", 45).value
        r = evaluate_series(_spec("o+:2 >= 0"), 30)
        ok1, d1 = _close(r.value.real, 2 * G, 1e-10)
        v = oracle_eval(_spec("o+:2 >= 0"), 14)
        ok2, d2 = _close(v.value, 2 * G, 1e-10)
        r3 = evaluate_series(_spec("o+:3 >= 0"), 30)
        pi = gmpy2.const_pi()
        l2 = gmpy2.log(mpfr(2))
        closed = (-pi ** 3 / 32 - pi * l2 ** 2 / 8
                  + 4 * constant("im_li3_1pi_half", 40).value)
        ok3, d3 = _close(r3.value.real, closed, 1e-8)
        ok4, d4 = _close(r3.value.real, mpfr("1.122690025"), 1e-8)
    return ok1 and ok2 and ok3 and ok4, f"pipeline {d1}; oracle {d2}; b3 {d3} / {d4}"


def check_seven_zeta3():
    with working_digits(50):
        z3 = gmpy2.zeta(mpfr(3))
        r = evaluate_series(_spec("n:2 > o+:1 >= 0"), 30)
        return _close(r.value.real, 7 * z3, 1e-10)


def check_chi_heads():
    with working_digits(50):
        r2 = evaluate_series(_spec("o-:2 > 0"), 30)
        ok2, d2 = _close(r2.value.real, mpfr("2.954621213"), 1e-8)
        G = constant("G", 45).value
        pi = gmpy2.const_pi()
        l2 = gmpy2.log(mpfr(2))
        closed = (2 * G - pi ** 3 / 32
                  + 4 * constant("im_li3_1pi_half", 40).value - pi * l2 ** 2 / 8)
        okc, dc = _close(r2.value.real, closed, 1e-10)
        r3 = evaluate_series(_spec("o-:3 > 0"), 30)
        ok3, d3 = _close(r3.value.real, mpfr("2.1543060048"), 1e-8)
    return ok2 and okc and ok3, f"w2 {d2}; closed {dc}; w3 {d3}"


def check_mixed_parity_values():
    cases = [
        ("o-:2 > o+:1 >= 0", "3.937040753"),
        ("o+:2 >= o-:1 > 0", "1.630404535576"),
        ("e:2 > o+:1 >= o-:2 > 0", "0.98658158829"),
        ("e:2 > o-:1 > 0", "1.5053689423"),
    ]
    details, ok = [], True
    with working_digits(50):
        for dsl, target in cases:
            r = evaluate_series(_spec(dsl), 30)
            o, d = _close(r.value.real, mpfr(target), 1e-8)
            ok = ok and o
            details.append(f"{dsl}: {d}")
        pi = gmpy2.const_pi()
        G = constant("G", 45).value
        z3 = gmpy2.zeta(mpfr(3))
        r = evaluate_series(_spec("e:2 > o-:1 > 0"), 30)
        o, d = _close(r.value.real, pi ** 2 / 8 - 2 * G + 7 * z3 / 4, 1e-10)
        ok = ok and o
        details.append(f"closed form: {d}")
    return ok, "; ".join(details)


def check_example_s():
    with working_digits(60):
        G = constant("G", 50).value
        z3 = gmpy2.zeta(mpfr(3))
        r = evaluate_series(_spec("n:2 >= o+:1 >= o-:1 > 0"), 40)
        ok1, d1 = _close(r.parts["main"].value.real, 8 * G * G, 1e-9)
        s2 = r.parts["head_diagonal"].value.real
        ok2, d2 = _close(s2, 7 * z3 - 8 * G, 1e-8)
        ok3, d3 = _close(r.value.real, mpfr("7.79861732643"), 1e-8)
    rel = find_relation(s2, ["zeta3", "G"], digits=22)
    ok4 = (rel is not None and rel["value_coeff"] == -1
           and rel["coeffs"] == {"zeta3": 7, "G": -8})
    return ok1 and ok2 and ok3 and ok4, (
        f"S1 {d1}; S2 {d2}; S {d3}; relation {rel and rel['coeffs']}")


def check_squared_values():
    cases = [
        ("o+:4 >= e:1 > 0", "0.04433915814", "w5"),
        ("e:3 > o-:1 > 0", "0.40829155182", None),
        ("o-:3 > e:1 > 0", "0.38530528471", "w4+2w5+w6"),
    ]
    ok, details = True, []
    with working_digits(50):
        for dsl, target, closed in cases:
            r = evaluate_series(_spec(dsl, bp=2), 30)
            o, d = _close(r.value.real, mpfr(target), 1e-8)
            ok = ok and o
            details.append(f"{dsl}: {d}")
            if closed == "w5":
                o2, d2 = _close(r.value.real, constant("w5", 25).value, 1e-10)
                ok = ok and o2
                details.append(f"W5 {d2}")
            elif closed == "w4+2w5+w6":
                comb = (constant("w4", 25).value + 2 * constant("w5", 25).value
                        + constant("w6", 25).value)
                o2, d2 = _close(r.value.real, comb, 1e-10)
                ok = ok and o2
                details.append(f"W6+2W5+W4 {d2}")
    return ok, "; ".join(details)


def check_beta_family():
    ok, details = True, []
    with working_digits(50):
        pi = gmpy2.const_pi()
        for d in (1, 2, 3):
            t = t_star_direct((2,) * d, 25)
            target = 4 / pi * dirichlet_beta(2 * d + 1, 40)
            o, det = _close(t.value, target, 1e-10)
            ok = ok and o
            details.append(f"t*(2_{d}) {det}")
        for d in (1, 2, 3):
            # ones at y = pi/4: all o+:1 chains at x^2 = 1/2 sum to 2 beta(d)
            spec = SeriesSpec(((OP, 1),) * d, (WEAK,) * d, 1, Fraction(1, 2))
            v = oracle_eval(spec, 25)
            o, det = _close(v.value, 2 * dirichlet_beta(d, 40), 1e-10)
            ok = ok and o
            details.append(f"ones d={d} {det}")
            cf = closed_form_tstar("ones", d, gmpy2.const_pi() / 4, 30)
            o2, _ = _close(cf.value, v.value, 1e-10)
            ok = ok and o2
            # twos at y = pi/2: all o+:2 chains at x^2 = 1 sum to 2 beta(2d)
            spec2 = SeriesSpec(((OP, 2),) * d, (WEAK,) * d, 1, Fraction(1))
            v2 = evaluate_series(spec2, 28)
            o3, det3 = _close(v2.value.real, 2 * dirichlet_beta(2 * d, 40), 1e-10)
            ok = ok and o3
            details.append(f"twos d={d} {det3}")
            cf2 = closed_form_tstar("twos", d, gmpy2.const_pi() / 2, 30)
            o4, _ = _close(cf2.value, v2.value.real, 1e-10)
            ok = ok and o4
    return ok, "; ".join(details)


def check_algebraic_points():
    ok, details = True, []
    with working_digits(60):
        pi3 = gmpy2.const_pi() ** 3
        s3 = gmpy2.sqrt(mpfr(3))
        for x2, target, label in [
            (Fraction(1, 4), pi3 / (324 * s3), "pi^3/(324 sqrt3)"),
            (Fraction(3, 4), 2 * pi3 / (81 * s3), "2pi^3/(81 sqrt3)"),
        ]:
            r = evaluate_series(_spec("o+:1 >= e:2 > 0", x2=x2), 30)
            o, d = _close(r.value.real, target, 1e-10)
            ok = ok and o
            details.append(f"{label} {d}")
        # x^2 = 1/2: the oracle arbitrates pi^3/192 against the paper's
        # printed pi^3/(96 sqrt 3); the latter must NOT match
        r = evaluate_series(_spec("o+:1 >= e:2 > 0", x2=Fraction(1, 2)), 30)
        v = oracle_eval(_spec("o+:1 >= e:2 > 0", x2=Fraction(1, 2)), 25)
        o1, d1 = _close(r.value.real, pi3 / 192, 1e-10)
        o2, d2 = _close(r.value.real, v.value, 1e-10)
        mismatched = abs(r.value.real - pi3 / (96 * s3)) > mpfr("1e-3")
        ok = ok and o1 and o2 and mismatched
        details.append(f"pi^3/192 {d1}; oracle {d2}; "
                       f"paper's 96sqrt3 variant off by "
                       f"{float(abs(r.value.real - pi3/(96*s3))):.3f}")
        r2 = evaluate_series(_spec("o+:2 >= 0", x2=Fraction(1, 4)), 30)
        o3, d3 = _close(r2.value.real, mpfr("1.063459833"), 1e-8)
        ok = ok and o3
        details.append(f"binom(2n,n) odd square {d3}")
    return ok, "; ".join(details)


def check_interleave_instances():
    ok, details = True, []
    with working_digits(50):
        # (a): sum b_n zeta_n(1) t_n(1) / n^2, |k|+|l|+p = 4
        specs = interleave_chains((1,), (1,), (("n"), 2), 1)
        total = mpfr(0)
        for sp in specs:
            total += evaluate_series(sp, 30).value.real
        brute = interleaved_bruteforce((1,), (1,), (("n"), 2), 1, 4000, 25)
        o, d = _close(total, brute.value, 1e-8)
        ok = ok and o
        details.append(f"(a) n^2 zeta(1) t(1): {d} [{len(specs)} interleavings]")
        # (c): sum b_n zeta_n(1) t_n(1) / (2n+1)^2
        specs = interleave_chains((1,), (1,), (("o+"), 2), 1)
        total = mpfr(0)
        for sp in specs:
            total += evaluate_series(sp, 30).value.real
        brute = interleaved_bruteforce((1,), (1,), (("o+"), 2), 1, 4000, 25)
        o, d = _close(total, brute.value, 1e-8)
        ok = ok and o
        details.append(f"(c) (2n+1)^2 zeta(1) t(1): {d} [{len(specs)}]")
    return ok, "; ".join(details)


# ---------------------------------------------------------------------------
# property checks (acceptance criterion 10)


def _random_word(rng, letters, max_len=4):
    n = rng.randint(1, max_len)
    return tuple(rng.choice(letters) for _ in range(n))


def check_shuffle_algebra():
    from .words import A, X1, XI, XM1, XMI
    rng = random.Random(7)
    letters = [A, X1, XI, XM1, XMI]
    for _ in range(100):
        u = _random_word(rng, letters)
        v = _random_word(rng, letters)
        w = _random_word(rng, letters, 2)
        if shuffle(u, v) != shuffle(v, u):
            return False, f"commutativity fails on {u}, {v}"
        from .words import shuffle_sums
        lhs = shuffle_sums(shuffle(u, v), [(GaussianRational.of(1), w)])
        rhs = shuffle_sums([(GaussianRational.of(1), u)], shuffle(v, w))
        if lhs != rhs:
            return False, f"associativity fails on {u}, {v}, {w}"
    # counting: shuffle(ab, cd) has C(4,2) = 6 interleavings in total
    if sum(c.re for c, _ in shuffle((A, XI), (XM1, XMI))) != 6:
        return False, "interleaving count != 6"
    return True, "commutative/associative on 100 random word triples"


def check_shuffle_homomorphism():
    rng = random.Random(11)
    from .words import A, XI, XM1, XMI
    letters = [A, XI, XM1, XMI]
    with working_digits(30):
        for trial in range(20):
            while True:
                u = _random_word(rng, letters, 3)
                v = _random_word(rng, letters, 3)
                if is_admissible(u) and is_admissible(v):
                    break
            eu = x_word_integral(u, 0, 18, check=False).value
            ev = x_word_integral(v, 0, 18, check=False).value
            acc = gmpy2.mpc(0)
            for c, w in shuffle(u, v):
                acc += c.to_mpc() * x_word_integral(w, 0, 18, check=False).value
            if float(abs(eu * ev - acc)) > 1e-12:
                return False, f"homomorphism fails on {u} x {v}"
    return True, "eval(u)eval(v) = eval(u sh v), 20 admissible pairs, 1e-12"


def check_reversal_involution():
    rng = random.Random(3)
    from .words import A, X1, XI, XM1
    letters = [A, X1, XI, XM1]
    for _ in range(50):
        w = _random_word(rng, letters, 5)
        s1, r1 = reverse_with_sign(w)
        s2, r2 = reverse_with_sign(r1)
        if r2 != w or s1 != s2 or s1 != (-1) ** len(w) or s1 * s2 != 1:
            return False, f"involution fails on {w}"
    return True, "double reversal is the identity with sign +1 (50 words)"


def _random_canonical_spec(rng, max_depth=3, max_exp=3, x2=Fraction(1),
                           binom_power=1, min_s1=2):
    depth = rng.randint(1, max_depth)
    factors = []
    for j in range(depth):
        if j == 0:
            form = rng.choice([E, OP, OM])
            s = rng.randint(min_s1 if binom_power == 1 else 3, max_exp)
        else:
            form = rng.choice([E, OP])
            s = rng.randint(1, max_exp)
        factors.append((form, s))
    junctions = tuple(WEAK if f == OP else STRICT for f, _ in factors)
    return SeriesSpec(tuple(factors), junctions, binom_power, x2)


def check_cov_identity():
    from .compiler import PrefactoredIntegral

    rng = random.Random(23)
    digits = 18
    checked = 0
    with working_digits(30):
        for xval in ("0.3", "0.7", "1"):
            x = mpfr(xval)
            lam = gmpy2.sqrt((1 - x) / (1 + x)) if x != 1 else mpfr(0)
            for _ in range(10):
                spec = _random_canonical_spec(rng)
                if spec.weight > 5:
                    continue
                pi = compile_spec(spec)
                _, pid, word = pi.terms[rng.randrange(len(pi.terms))]
                lhs = omega_word_integral(word, x, digits, check=False).value
                one_term = PrefactoredIntegral(
                    [(GaussianRational.of(1), pid, word)], spec)
                ct = to_x_alphabet(one_term)[0]
                rhs = ct.scalar.to_mpc() * x_word_integral(
                    ct.word, lam, digits, check=False).value
                if float(abs(lhs - rhs)) > 1e-12:
                    return False, (f"CoV identity fails at x={xval} on "
                                   f"{word}: gap {float(abs(lhs-rhs)):.2e}")
                checked += 1
    return True, f"theta-march == reversed x-march on {checked} words, 1e-12"


def check_word_bookkeeping():
    rng = random.Random(41)
    for i in range(200):
        spec = _random_canonical_spec(rng, max_depth=4, max_exp=3)
        pi = compile_spec(spec)
        bounds = word_length_bounds(spec)
        base, _ = spec.aliased_to_e()
        w = base.weight
        for _, _, word in pi.terms:
            if len(word) not in bounds:
                return False, f"length {len(word)} outside {bounds} for {spec}"
            if base.factors[0][0] != OM:
                n1 = sum(1 for l in word if l == W1)
                want_even = base.factors[0][0] == E
                if (n1 % 2 == 0) != want_even:
                    return False, f"w1-parity violated for {spec}: {word}"
    return True, "word lengths and w1 parity hold on 200 random canonical specs"


def _corpus_monomials(max_weight=4):
    """Admissible monomials from the golden compiles, up to max_weight."""
    seen = []
    for dsl in ("o+:2 >= 0", "n:2 > o+:1 >= 0", "o-:2 > 0", "o+:3 >= 0",
                "o+:2 >= o-:1 > 0", "e:2 > 0", "e:3 > 0"):
        spec = parse_spec(dsl)
        combo = canonicalize(spec)
        for t in combo.terms:
            for cov in to_x_alphabet(compile_spec(t.spec)):
                for c, mono in expand_composites([(GaussianRational.of(1), cov.word)]):
                    if len(mono) <= max_weight and mono not in seen:
                        seen.append(mono)
    return seen


def check_engine_agreement():
    monos = _corpus_monomials(4)
    with working_digits(34):
        for mono in monos:
            s, z = word_to_li(mono)
            li = mpl_sum(s, z, 20)
            mv = x_word_integral(mono, 0, 20, check=False)
            if float(abs(li.value - mv.value)) > 1e-12:
                return False, (f"engines disagree on {mono}: "
                               f"{float(abs(li.value - mv.value)):.2e}")
    return True, f"mpl_sum == ode march on {len(monos)} corpus monomials, 1e-12"


def check_admissibility_and_t_vanishing():
    rng = random.Random(57)
    n_mono = n_reg = 0
    for _ in range(25):
        spec = _random_canonical_spec(rng)
        combo = canonicalize(spec)
        for t in combo.terms:
            covs = to_x_alphabet(compile_spec(t.spec))
            n_mono += admissible_check(covs)["monomials"]
            for cov in covs:
                monos = expand_composites([(GaussianRational.of(1), cov.word)])
                # reg_decompose is quadratic in weight; spot-check a sample
                for c, mono in rng.sample(monos, min(12, len(monos))):
                    dec = reg_decompose(mono)
                    if set(dec) != {(0, 0)}:
                        return False, f"T-coefficients appear on {mono}"
                    n_reg += 1
    return True, (f"{n_mono} pipeline monomials admissible; "
                  f"zero T-part on {n_reg} sampled decompositions")


def check_normalizer_preservation():
    rng = random.Random(71)
    x2 = Fraction(9, 16)
    with working_digits(40):
        for i in range(20):
            depth = rng.randint(1, 3)
            factors, junctions = [], []
            while True:
                factors = [(rng.choice([E, OP, OM, "n"]), rng.randint(1, 3))
                           for _ in range(depth)]
                junctions = [rng.choice([STRICT, WEAK]) for _ in range(depth)]
                sp = SeriesSpec(tuple(factors), tuple(junctions), 1, x2)
                if not validate(sp) and sp.weight <= 6:
                    break
            combo = canonicalize(sp)
            lhs = oracle_eval(sp, 22).value
            rhs = from_fraction(combo.constant.re)
            for t in combo.terms + combo.divergent:
                rhs += from_fraction(t.coeff.re) * oracle_eval(t.spec, 22).value
            if float(abs(lhs - rhs)) > 1e-15:
                return False, f"preservation fails on {sp}: {float(abs(lhs-rhs)):.2e}"
    return True, "oracle(input) = sum coeff oracle(term) on 20 random specs, 1e-15"


def check_normalizer_canonical_forms():
    rng = random.Random(91)
    for _ in range(50):
        spec = _random_canonical_spec(rng)
        combo = canonicalize(spec)
        if not (len(combo.terms) == 1 and combo.terms[0].spec == spec.aliased_to_e()[0]
                and combo.terms[0].coeff == GaussianRational.of(1)
                and not combo.divergent and not combo.constant):
            return False, f"idempotence fails on {spec}"
        if not is_canonical(spec):
            return False, f"is_canonical false on canonical {spec}"
    rng2 = random.Random(97)
    for _ in range(50):
        depth = rng2.randint(1, 3)
        while True:
            factors = [(rng2.choice([E, OP, OM, "n"]), rng2.randint(1, 3))
                       for _ in range(depth)]
            junctions = [rng2.choice([STRICT, WEAK]) for _ in range(depth)]
            sp = SeriesSpec(tuple(factors), tuple(junctions), 1, Fraction(9, 16))
            if not validate(sp):
                break
        combo = canonicalize(sp)
        for t in combo.terms + combo.divergent:
            for j, (form, _) in enumerate(t.spec.factors):
                if form == OM and j > 0:
                    return False, f"o- survives at position {j+1} in {t.spec}"
    return True, "idempotence on canonical specs; no o- beyond the head"


def check_precision_scaling():
    spec = parse_spec("o+:2 >= o-:1 > 0")
    r1 = evaluate_series(spec, 20)
    r2 = evaluate_series(spec, 40)
    gap = float(abs(r1.value.value - r2.value.value))
    ok = gap <= max(r1.value.err, 1e-18)
    return ok, f"20- vs 40-digit gap {gap:.2e} within estimate {r1.value.err:.2e}"


GOLDEN = [
    ("apery_anchors", check_apery_anchors),
    ("catalan_2g", check_catalan_pipeline_and_oracle),
    ("seven_zeta3", check_seven_zeta3),
    ("chi_heads", check_chi_heads),
    ("mixed_parity", check_mixed_parity_values),
    ("example_s", check_example_s),
    ("squared_binomial", check_squared_values),
    ("beta_family", check_beta_family),
    ("algebraic_points", check_algebraic_points),
    ("interleave_cor51", check_interleave_instances),
]

PROPERTIES = [
    ("shuffle_algebra", check_shuffle_algebra),
    ("shuffle_homomorphism", check_shuffle_homomorphism),
    ("reversal_involution", check_reversal_involution),
    ("cov_identity", check_cov_identity),
    ("word_bookkeeping", check_word_bookkeeping),
    ("engine_agreement", check_engine_agreement),
    ("admissibility_t_vanishing", check_admissibility_and_t_vanishing),
    ("normalizer_preservation", check_normalizer_preservation),
    ("normalizer_canonical", check_normalizer_canonical_forms),
    ("precision_scaling", check_precision_scaling),
]


def run_suite(which="all", name_filter=None):
    checks = []
    if which in ("golden", "all"):
        checks += [("golden", n, f) for n, f in GOLDEN]
    if which in ("properties", "all"):
        checks += [("properties", n, f) for n, f in PROPERTIES]
    if name_filter:
        checks = [c for c in checks if name_filter in c[1]]
    results = []
    for suite, name, fn in checks:
        t0 = time.time()
        try:
            ok, detail = fn()
        except Exception as exc:  # noqa: BLE001 - report, don't crash the runner
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, suite, ok, detail, time.time() - t0))
    return results
