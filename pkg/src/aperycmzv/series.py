"""Series DSL, validation, and the direct-summation oracle.

A series spec describes

    sum over n_1 >:1 n_2 >:2 ... >:d 0  of  (b_{n1} * q^{n1})^P / prod_j F_j(n_j)^{s_j}

where ``b_n = 4^n / C(2n,n)``, ``q = x^2`` is an exact rational, ``P`` is 1
or 2, each factor form F is one of

    e   -> 2n        o+  -> 2n+1        o-  -> 2n-1        n   -> n

and each junction ``>:j`` (between index j and j+1, the last one against 0)
is strict (``>``) or weak (``>=``).  The textual grammar is

    spec     := factor (junction factor)* junction "0"
    factor   := ("e" | "o+" | "o-" | "n") ":" positive-int
    junction := ">" | ">="

e.g. ``"n:2 >= o+:1 >= o-:1 > 0"``.

The oracle in this module sums specs directly (nothing shared with the
integral pipeline): geometric truncation for |q| < 1, extrapolated partial
sums at q = 1.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .hp import (AccelerationError, HPReal, TailModel, accelerate,
                 from_fraction, geometric_checkpoints, working_digits)

E, OP, OM, N = "e", "o+", "o-", "n"
FORMS = (E, OP, OM, N)
STRICT, WEAK = "strict", "weak"

# affine form an + c per tag (N handled by pre-scaling where exactness matters)
_FORM_AFFINE = {E: (2, 0), OP: (2, 1), OM: (2, -1), N: (1, 0)}


def form_value(form: str, n: int) -> int:
    a, c = _FORM_AFFINE[form]
    return a * n + c


@dataclass(frozen=True)
class SeriesSpec:
    factors: tuple  # of (form, exponent)
    junctions: tuple  # of STRICT | WEAK, same length
    binom_power: int = 1
    x2: Fraction = Fraction(1)

    def __post_init__(self):
        if len(self.factors) != len(self.junctions):
            raise ValueError("one junction per factor (the last against 0)")
        object.__setattr__(self, "factors", tuple((f, int(s)) for f, s in self.factors))
        object.__setattr__(self, "junctions", tuple(self.junctions))
        object.__setattr__(self, "x2", Fraction(self.x2))

    @property
    def depth(self) -> int:
        return len(self.factors)

    @property
    def weight(self) -> int:
        return sum(s for _, s in self.factors)

    def to_dsl(self) -> str:
        bits = []
        for (form, s), junc in zip(self.factors, self.junctions):
            bits.append(f"{form}:{s}")
            bits.append(">" if junc == STRICT else ">=")
        return " ".join(bits) + " 0"

    def to_json(self) -> dict:
        return {
            "factors": [{"form": f, "exp": s} for f, s in self.factors],
            "junctions": list(self.junctions),
            "binom_power": self.binom_power,
            "x2": f"{self.x2.numerator}/{self.x2.denominator}",
        }

    @staticmethod
    def from_json(obj: dict) -> "SeriesSpec":
        return SeriesSpec(
            factors=tuple((d["form"], d["exp"]) for d in obj["factors"]),
            junctions=tuple(obj["junctions"]),
            binom_power=obj.get("binom_power", 1),
            x2=Fraction(obj.get("x2", "1")),
        )

    def with_x2(self, x2) -> "SeriesSpec":
        return replace(self, x2=Fraction(x2))

    def aliased_to_e(self) -> tuple["SeriesSpec", int]:
        """Replace n-forms by e-forms; returns (spec, power of 2 scale)."""
        shift = 0
        factors = []
        for form, s in self.factors:
            if form == N:
                shift += s
                factors.append((E, s))
            else:
                factors.append((form, s))
        return replace(self, factors=tuple(factors)), shift

    def __str__(self):
        extra = ""
        if self.binom_power != 1:
            extra += f" [b^{self.binom_power}]"
        if self.x2 != 1:
            extra += f" [x2={self.x2}]"
        return self.to_dsl() + extra


class SpecSyntaxError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"at {p}: {m}" for p, m in self.errors))


_TOKEN = re.compile(r"\s*(>=|>|[a-z]\+?-?|:|\d+)")


def parse_spec(text: str, binom_power: int = 1, x2=Fraction(1)) -> SeriesSpec:
    """Parse the DSL; raises SpecSyntaxError listing (position, message)."""
    pos, toks = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecSyntaxError([(pos, f"unexpected character {text[pos]!r}")])
        toks.append((m.start(1), m.group(1)))
        pos = m.end()

    errors, factors, junctions = [], [], []
    i = 0

    def expect_factor():
        nonlocal i
        if i >= len(toks):
            errors.append((len(text), "expected factor, found end of input"))
            return
        p, t = toks[i]
        if t not in FORMS:
            errors.append((p, f"unknown form tag {t!r}"))
        i += 1
        if i >= len(toks) or toks[i][1] != ":":
            errors.append((p, "factor needs ':' and an exponent"))
            return
        i += 1
        if i >= len(toks) or not toks[i][1].isdigit():
            errors.append((toks[i - 1][0], "missing exponent"))
            return
        ep, ev = toks[i]
        i += 1
        if int(ev) == 0:
            errors.append((ep, "exponent must be >= 1"))
        factors.append((t if t in FORMS else E, max(int(ev), 1)))

    expect_factor()
    while i < len(toks):
        p, t = toks[i]
        if t not in (">", ">="):
            errors.append((p, f"expected '>' or '>=', found {t!r}"))
            break
        junctions.append(STRICT if t == ">" else WEAK)
        i += 1
        if i < len(toks) and toks[i][1] == "0":
            i += 1
            break
        expect_factor()
    else:
        errors.append((len(text), "missing terminator '> 0' or '>= 0'"))
    if i < len(toks):
        errors.append((toks[i][0], "trailing input after terminator"))
    if not errors and len(junctions) != len(factors):
        errors.append((len(text), "junction/factor count mismatch"))
    if errors:
        raise SpecSyntaxError(errors)
    return SeriesSpec(tuple(factors), tuple(junctions), binom_power, Fraction(x2))


def validate(spec: SeriesSpec) -> list:
    """Return violations (empty iff the spec defines a convergent series)."""
    out = []
    if spec.depth < 1:
        out.append("depth must be >= 1")
        return out
    for j, (form, s) in enumerate(spec.factors, 1):
        if s < 1:
            out.append(f"exponent of factor {j} must be >= 1")
    if abs(spec.x2) > 1:
        out.append("|x^2| must be <= 1")
    if spec.binom_power not in (1, 2):
        out.append("binom_power must be 1 or 2")

    # definedness: with q = max{j : form_j != o+}, junction q must be strict
    q = 0
    for j, (form, _) in enumerate(spec.factors, 1):
        if form != OP:
            q = j
    if q >= 1 and spec.junctions[q - 1] != STRICT:
        out.append(f"junction {q} must be strict (last non-o+ factor)")

    if abs(spec.x2) == 1:
        s1 = spec.factors[0][1]
        need = 2 if spec.binom_power == 1 else 3
        if s1 < need:
            out.append(f"s1 >= {need} required at x^2 = 1 for binom_power {spec.binom_power}")
    return out


# ---------------------------------------------------------------------------
# binomial weights


def binomial_weight(n: int) -> Fraction:
    """b_n = 4^n / C(2n,n) as an exact rational."""
    b = Fraction(1)
    for k in range(1, n + 1):
        b *= Fraction(2 * k, 2 * k - 1)
    return b


class _WeightIterator:
    """Streams (b_n * q^n)^P in mpfr via the b_n recurrence."""

    def __init__(self, q: Fraction, power: int):
        self.qf = from_fraction(q)
        self.power = power
        self.n = 0
        self.cur = mpfr(1)

    def advance(self):
        self.n += 1
        step = self.qf * mpfr(2 * self.n) / mpfr(2 * self.n - 1)
        self.cur *= step ** self.power
        return self.cur


# ---------------------------------------------------------------------------
# nested summation engine

class OracleUnavailable(RuntimeError):
    pass


def _nested_partial_sums(idx_factors, junctions, weight_iter, checkpoints):
    """Partial sums of the nested series at the given truncation points.

    ``idx_factors[j]`` is a list of (form, exp) sharing index j, so diagonal
    terms with two linear forms on one index reuse this engine.  Runs in
    O(N * depth) by maintaining cumulative inner sums.
    """
    d = len(idx_factors)
    N = checkpoints[-1]
    cum = [mpfr(0)] * (d + 1)  # cum[j] = sum_{m <= n} T_j(m), 1-indexed
    prev = [mpfr(0)] * (d + 1)
    out = []
    total = mpfr(0)
    ck = 0
    w = mpfr(1)
    for n in range(N + 1):
        if n > 0:
            w = weight_iter.advance()
        for j in range(d, 0, -1):
            # inner chain sum below index j
            if j == d:
                ok = n >= 1 if junctions[d - 1] == STRICT else n >= 0
                inner = mpfr(1) if ok else mpfr(0)
            else:
                inner = prev[j + 1] if junctions[j - 1] == STRICT else cum[j + 1]
            if inner == 0:
                t = mpfr(0)
            else:
                denom = 1
                for form, s in idx_factors[j - 1]:
                    fv = form_value(form, n)
                    if fv == 0:
                        raise ZeroDivisionError(
                            f"form {form} vanishes at n={n} on a reachable chain")
                    denom *= fv ** s
                t = inner / mpfr(denom)
            if j == 1:
                total += w * t
            else:
                prev[j] = cum[j]
                cum[j] = cum[j] + t
        if ck < len(checkpoints) and n == checkpoints[ck]:
            out.append((n, total))
            ck += 1
    return out


def _count_inner_log_blocks(spec: SeriesSpec) -> int:
    return sum(1 for _, s in spec.factors[1:] if s == 1)


def oracle_eval(spec: SeriesSpec, target_digits: int = 30) -> HPReal:
    """Direct-summation value of a spec, independent of the compiler path.

    |x^2| < 1: geometric truncation with an explicit tail bound.
    x^2 = 1: partial sums at geometric checkpoints, extrapolated with the
    half-integer power/log tail model (b_n ~ sqrt(pi n)).
    """
    bad = validate(spec)
    if bad:
        raise ValueError("invalid spec: " + "; ".join(bad))
    idx_factors = [[fs] for fs in spec.factors]
    return oracle_eval_general(idx_factors, spec.junctions, spec.x2,
                               spec.binom_power, target_digits)


def oracle_eval_general(idx_factors, junctions, x2, binom_power,
                        target_digits: int = 30) -> HPReal:
    """Direct summation allowing several linear forms on one index.

    Used for spec oracles and for unsplit product-form diagonals; the caller
    guarantees the factor/junction data describes a convergent series.
    """
    with working_digits(target_digits + 15):
        q = Fraction(x2)
        P = binom_power
        if abs(q) < 1:
            return _sum_geometric(idx_factors, junctions, q, P, target_digits)
        if q != 1:
            raise OracleUnavailable("oracle handles |x^2| < 1 or x^2 = 1 only")
        s1 = sum(s for _, s in idx_factors[0])
        e0 = Fraction(s1) - Fraction(P, 2) - 1
        logs = min(2, sum(1 for fs in idx_factors[1:]
                          if sum(s for _, s in fs) == 1))
        return _sum_accelerated(idx_factors, junctions, q, P, target_digits,
                                e0, logs, depth=len(idx_factors))


def _sum_geometric(idx_factors, junctions, q, P, digits):
    ratio = abs(q) ** P
    # enough terms that ratio^N covers the digits, with slack for polynomials
    n_terms = int((digits + 12) * 3.33 / -gmpy2.log2(from_fraction(ratio))) + 40
    weight = _WeightIterator(q, P)
    sums = _nested_partial_sums(idx_factors, junctions, weight,
                                [n_terms // 2, 3 * n_terms // 4, n_terms])
    tail = abs(sums[-1][1] - sums[-2][1]) * 4 + mpfr(10) ** (-digits - 8)
    return HPReal(sums[-1][1], float(tail))


def _sum_accelerated(idx_factors, junctions, q, P, digits, e0, logs, depth):
    if depth >= 5:
        raise OracleUnavailable("oracle unavailable at x^2=1 for depth >= 5, "
                                "use pipeline cross-check")
    n0 = max(96, 16 * depth)
    count = 12 if digits <= 14 else 14
    pts = geometric_checkpoints(n0, count)
    weight = _WeightIterator(q, P)
    samples = _nested_partial_sums(idx_factors, junctions, weight, pts)
    model = TailModel(e0=e0, powers=10, log_powers=logs)
    try:
        return accelerate(samples, model)
    except AccelerationError as exc:
        raise OracleUnavailable("oracle unavailable, use pipeline cross-check") from exc


def bruteforce_eval(spec: SeriesSpec, n_max: int, digits: int = 30) -> mpfr:
    """Literal nested-loop evaluation up to n_1 <= n_max.  Test oracle only."""
    with working_digits(digits):
        total = mpfr(0)
        d = spec.depth
        q = from_fraction(spec.x2)
        bw = mpfr(1)
        for n1 in range(0, n_max + 1):
            if n1 > 0:
                bw *= q * mpfr(2 * n1) / mpfr(2 * n1 - 1)
            w = bw ** spec.binom_power

            def rec(j, prev_n, acc):
                nonlocal total
                if j > d:
                    total += w * acc
                    return
                lo = 0
                hi = prev_n - 1 if (j > 1 and spec.junctions[j - 2] == STRICT) else prev_n
                if j == 1:
                    lo = hi = n1
                for nj in range(lo, hi + 1):
                    if j == d:
                        ok = nj >= 1 if spec.junctions[d - 1] == STRICT else nj >= 0
                        if not ok:
                            continue
                    fv = form_value(spec.factors[j - 1][0], nj)
                    if fv == 0:
                        continue
                    rec(j + 1, nj, acc / mpfr(fv) ** spec.factors[j - 1][1])

            rec(1, n1, mpfr(1))
        return total


# ---------------------------------------------------------------------------
# closed forms and t-star values


def t_star_direct(s: tuple, target_digits: int = 30) -> HPReal:
    """t*(s) = sum over n1>=...>=nd>=0 of prod (2 n_j + 1)^(-s_j), s1 >= 2."""
    if not s or s[0] < 2:
        raise ValueError("t* needs s1 >= 2")
    with working_digits(target_digits + 15):
        idx_factors = [[(OP, sj)] for sj in s]
        junctions = tuple(WEAK for _ in s)
        e0 = Fraction(s[0] - 1)
        logs = min(2, sum(1 for sj in s[1:] if sj == 1))
        pts = geometric_checkpoints(max(96, 16 * len(s)), 14)

        class _One:
            def advance(self):
                return mpfr(1)

        samples = _nested_partial_sums(idx_factors, junctions, _One(), pts)
        return accelerate(samples, TailModel(e0=e0, powers=10, log_powers=logs))


def closed_form_tstar(variant: str, d: int, y, target_digits: int = 30):
    """tau*(1_d; sin y) resp. tau*(2_d; sin y) via the csc * Im Li closed forms.

    ones: 2 csc(2y) Im Li_d(i tan y)     for y in (0, pi/2)
    twos: 2 csc(y) Im Li_{2d}(i tan(y/2)) for y in (0, pi/2]
    """
    import mpmath

    if d < 1:
        raise ValueError("depth must be >= 1")
    with working_digits(target_digits + 10):
        yv = mpfr(y)
        pi = gmpy2.const_pi()
        if variant == "ones":
            if not (0 < yv < pi / 2):
                raise ValueError("ones variant needs y in (0, pi/2)")
            arg, order, fac = gmpy2.tan(yv), d, 2 / gmpy2.sin(2 * yv)
        elif variant == "twos":
            if not (0 < yv <= pi / 2):
                raise ValueError("twos variant needs y in (0, pi/2]")
            arg, order, fac = gmpy2.tan(yv / 2), 2 * d, 2 / gmpy2.sin(yv)
        else:
            raise ValueError("variant must be 'ones' or 'twos'")
        mpmath.mp.dps = target_digits + 10
        li = mpmath.polylog(order, mpmath.mpc(0, str(arg)))
        val = fac * mpfr(str(li.imag))
        return HPReal(val, float(abs(val)) * 10 ** (-target_digits - 4) + 1e-60)


# ---------------------------------------------------------------------------
# interleavings of zeta_n / t_n chains (the double-sum corollary)


def interleave_chains(k: tuple, l: tuple, head: tuple, binom_power: int = 1):
    """All mixed-parity specs whose sum equals sum_n b_n^P zeta_n(k) t_n(l) / head.

    ``head`` is ("n", p) or ("o+", p).  zeta_n runs over n >= m_1 > ... > 0
    with integer factors m^k; t_n over n >= r_1 > ... > 0 with odd factors
    (2r-1)^l.  Even and odd forms never collide, so the product expands into
    pure interleavings: a zeta-index above a t-index forces m > r, the other
    order forces r >= m.
    """
    head_form, p = head
    if head_form not in (N, OP):
        raise ValueError("head must be an n- or o+-form")
    d, e = len(k), len(l)
    specs = []
    for zeta_slots in itertools.combinations(range(d + e), d):
        factors = [(head_form, p)]
        junctions = []
        kinds = ["z" if i in zeta_slots else "t" for i in range(d + e)]
        ki = ti = 0
        prev = "head"
        for kind in kinds:
            if prev == "head":
                junctions.append(WEAK)
            elif prev == kind:
                junctions.append(STRICT)
            elif prev == "z":  # zeta above t: m > r
                junctions.append(STRICT)
            else:  # t above zeta: r >= m
                junctions.append(WEAK)
            if kind == "z":
                factors.append((N, k[ki]))
                ki += 1
            else:
                factors.append((OM, l[ti]))
                ti += 1
            prev = kind
        junctions.append(STRICT)  # both chains end strictly above 0
        if d + e == 0:
            junctions = [STRICT if head_form == N else WEAK]
        spec = SeriesSpec(tuple(factors), tuple(junctions), binom_power, Fraction(1))
        specs.append(spec)
    return specs


def interleaved_bruteforce(k: tuple, l: tuple, head: tuple, binom_power: int,
                           n_max: int, digits: int = 30,
                           accelerated: bool = True) -> HPReal:
    """sum_n b_n^P zeta_n(k) t_n(l) / head(n)^p summed directly.

    Incremental zeta_n / t_n updates keep this O(n_max * (|k|+|l|)).
    """
    head_form, p = head
    with working_digits(digits + 10):
        zcum = [mpfr(1)] + [mpfr(0)] * len(k)  # zcum[i] = zeta-chain of depth i, indices <= n
        tcum = [mpfr(1)] + [mpfr(0)] * len(l)
        bw = mpfr(1)
        total = mpfr(0)
        if accelerated:
            # sqrt(2)-spaced truncation points ending at n_max; the
            # half-integer tail ladder needs a dense node set at this size
            pts = [n_max]
            while pts[-1] > max(32, n_max // 32):
                pts.append(int(pts[-1] / 1.4142135623730951))
            pts = sorted(set(pts))
        else:
            pts = [n_max]
        samples = []
        ck = 0
        for n in range(0, n_max + 1):
            if n > 0:
                bw *= mpfr(2 * n) / mpfr(2 * n - 1)
                # extend chains by allowing index value n
                for i in range(len(k), 0, -1):
                    zcum[i] += zcum[i - 1] / mpfr(n) ** k[i - 1]
                for i in range(len(l), 0, -1):
                    tcum[i] += tcum[i - 1] / mpfr(2 * n - 1) ** l[i - 1]
            hv = form_value(head_form, n)
            if hv == 0:
                continue
            term = bw ** binom_power * zcum[len(k)] * tcum[len(l)] / mpfr(hv) ** p
            total += term
            if ck < len(pts) and n == pts[ck]:
                samples.append((n, total))
                ck += 1
        if not accelerated:
            return HPReal(total, 1e-8)
        e0 = Fraction(p) - Fraction(binom_power, 2) - 1
        logs = min(2, sum(1 for v in tuple(k) + tuple(l) if v == 1))
        return accelerate(samples, TailModel(e0=e0, powers=8, log_powers=logs),
                          min_basis=2)
