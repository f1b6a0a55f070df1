"""Compilation of canonical specs into prefactored omega-words.

Each factor of a spec contributes one block of 1-form letters; the head
factor additionally contributes a prefactor function of the evaluation point
x.  With s the factor's exponent, the rules are

    head  e,  s=1: (f2, -)             e,  s>=2: (f1, w0^(s-2) w1)
          o+, s=1: (f20, -)            o+, s>=2: (f3, w0^(s-2) w3)
          o-, s=1: (f5, w3) + (f2, -)  o-, s>=2: (f5, w0^(s-1) w3) + (f5, w0^(s-2) w3)

    middle e:  s=1: w2                 s>=2: w1 w0^(s-2) w1
           o+: s=1: w20                s>=2: w3 w0^(s-2) w3
           o-: s=1: w5 w3 + w2         s>=2: w5 w0^(s-1) w3 + w5 w0^(s-2) w3

with prefactors f1=1, f2=x/sqrt(1-x^2), f3=1/x, f5=x, f20=1/(x sqrt(1-x^2)),
and every word closed by the tail letter w1 (the n=0 ending block).  o-
middles emit the second-order letter w5 and are only allowed in native mode;
the canonical pipeline shifts them away first.

The squared-binomial variant at x=1 replaces the head by

    e: w3 w0^(s-3) w1    o+: w1 w0^(s-3) w3    o-: w1 (w0+1)^2 w0^(s-3) w3

(o- expanding into three words with multiplicity 1,2,1), keeps the middles,
and uses prefactor f1 over [0,1]; it needs s1 >= 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .gaussian import GaussianRational, ONE as G_ONE
from .series import E, OM, OP, STRICT, WEAK, SeriesSpec, validate
from .normalize import native_junction
from .words import W0, W1, W2, W3, W5, W8, W20, word_str

F1, F2, F3, F5, F20 = "f1", "f2", "f3", "f5", "f20"
PREFACTORS = (F1, F2, F3, F5, F20)


def prefactor_value(pid: str, x: mpfr) -> mpfr:
    """f_j(x); f2 and f20 are singular at x=1 (exponent-1 heads only)."""
    if pid == F1:
        return mpfr(1)
    if pid == F5:
        return x
    if pid == F3:
        return 1 / x
    root = gmpy2.sqrt(1 - x * x)
    if pid == F2:
        return x / root
    if pid == F20:
        return 1 / (x * root)
    raise ValueError(f"unknown prefactor {pid!r}")


def prefactor_function(pid: str, t: mpfr) -> mpfr:
    """f_j as the pointwise function satisfying f_j(t) * w1 = w_j."""
    return prefactor_value(pid, t)


class CompileError(ValueError):
    pass


@dataclass
class PrefactoredIntegral:
    """sum of coeff * f_pid(x) * integral_0^x (word, tail letter w1 included)."""

    terms: list  # of (GaussianRational, prefactor id, word tuple)
    spec: SeriesSpec

    def merged(self) -> "PrefactoredIntegral":
        acc: dict = {}
        for coeff, pid, word in self.terms:
            key = (pid, word)
            acc[key] = acc.get(key, GaussianRational()) + coeff
        terms = [(c, pid, word) for (pid, word), c in acc.items() if c]
        terms.sort(key=lambda t: (t[1], len(t[2]), t[2]))
        return PrefactoredIntegral(terms, self.spec)

    def scaled(self, factor) -> "PrefactoredIntegral":
        return PrefactoredIntegral(
            [(c * factor, pid, word) for c, pid, word in self.terms], self.spec)

    def __str__(self):
        lines = []
        for coeff, pid, word in self.terms:
            body = word_str(word[:-1]) if len(word) > 1 else "(empty)"
            lines.append(f"({coeff}) [{pid}] {body} | {word[-1]}")
        return "\n".join(lines) or "(zero)"


def _head_alternatives(form: str, s: int, squared: bool):
    if squared:
        if s < 3:
            raise CompileError("squared-binomial head needs s1 >= 3")
        if form == E:
            return [(1, F1, (W3,) + (W0,) * (s - 3) + (W1,))]
        if form == OP:
            return [(1, F1, (W1,) + (W0,) * (s - 3) + (W3,))]
        if form == OM:
            return [
                (1, F1, (W1,) + (W0,) * (s - 1) + (W3,)),
                (2, F1, (W1,) + (W0,) * (s - 2) + (W3,)),
                (1, F1, (W1,) + (W0,) * (s - 3) + (W3,)),
            ]
    else:
        if form == E:
            return [(1, F2, ())] if s == 1 else [(1, F1, (W0,) * (s - 2) + (W1,))]
        if form == OP:
            return [(1, F20, ())] if s == 1 else [(1, F3, (W0,) * (s - 2) + (W3,))]
        if form == OM:
            if s == 1:
                return [(1, F5, (W3,)), (1, F2, ())]
            return [
                (1, F5, (W0,) * (s - 1) + (W3,)),
                (1, F5, (W0,) * (s - 2) + (W3,)),
            ]
    raise CompileError(f"unknown head form {form!r}")


def _middle_alternatives(form: str, s: int, native: bool):
    if form == E:
        return [(1, (W2,))] if s == 1 else [(1, (W1,) + (W0,) * (s - 2) + (W1,))]
    if form == OP:
        return [(1, (W20,))] if s == 1 else [(1, (W3,) + (W0,) * (s - 2) + (W3,))]
    if form == OM:
        if not native:
            raise CompileError("o- middle blocks require native mode "
                               "(canonical pipeline shifts them away)")
        if s == 1:
            return [(1, (W5, W3)), (1, (W2,))]
        return [
            (1, (W5,) + (W0,) * (s - 1) + (W3,)),
            (1, (W5,) + (W0,) * (s - 2) + (W3,)),
        ]
    raise CompileError(f"unknown middle form {form!r}")


def _check_junctions(spec: SeriesSpec):
    for (form, _), junc in zip(spec.factors, spec.junctions):
        if junc != native_junction(form):
            raise CompileError(
                f"junction below {form} must be {native_junction(form)}; "
                "run the normalizer first")


def compile_spec(spec: SeriesSpec, mode: str = "canonical") -> PrefactoredIntegral:
    """Compile a native-junction spec with binom_power 1; n-aliases rescale.

    In canonical mode (the default, and the only mode feeding CMZV output)
    o- may appear as the head only.  mode="native" also accepts o- middles,
    emitting w5 letters for numeric cross-checks.
    """
    if spec.binom_power != 1:
        raise CompileError("use compile_squared for binom_power 2")
    base, shift = spec.aliased_to_e()
    _check_junctions(base)
    scale = GaussianRational(Fraction(2 ** shift))
    native = mode == "native"
    if mode not in ("canonical", "native"):
        raise ValueError("mode must be 'canonical' or 'native'")
    head_form, s1 = base.factors[0]
    if abs(base.x2) == 1 and s1 == 1:
        raise CompileError("exponent-1 head at x^2 = 1: prefactor singular; "
                           "evaluate in limit mode")
    stack = [(G_ONE * m, pid, w)
             for m, pid, w in _head_alternatives(head_form, s1, squared=False)]
    for form, s in base.factors[1:]:
        stack = [(coeff * m, pid, word + w)
                 for coeff, pid, word in stack
                 for m, w in _middle_alternatives(form, s, native)]
    terms = [(coeff * scale, pid, word + (W1,)) for coeff, pid, word in stack]
    out = PrefactoredIntegral(terms, spec).merged()
    if mode == "canonical":
        for _, _, word in out.terms:
            assert W5 not in word and "wdt" not in word
    return out


def compile_squared(spec: SeriesSpec) -> PrefactoredIntegral:
    """Squared-binomial compilation at x = 1 (limits [0,1], prefactor f1)."""
    if spec.binom_power != 2:
        raise CompileError("compile_squared needs binom_power 2")
    if spec.x2 != 1:
        raise CompileError("squared-binomial pipeline is defined at x^2 = 1 only")
    base, shift = spec.aliased_to_e()
    _check_junctions(base)
    scale = GaussianRational(Fraction(4 ** shift))
    head_form, s1 = base.factors[0]
    heads = _head_alternatives(head_form, s1, squared=True)
    stack = [(G_ONE * m, pid, w) for m, pid, w in heads]
    for form, s in base.factors[1:]:
        stack = [(coeff * m, pid, word + w)
                 for coeff, pid, word in stack
                 for m, w in _middle_alternatives(form, s, native=True)]
    terms = [(coeff * scale, pid, word + (W1,)) for coeff, pid, word in stack]
    return PrefactoredIntegral(terms, spec).merged()


def lemma21_word(s: tuple) -> tuple:
    """Word for ti_s(x) = sum x^(2n1+1)/prod (2n_j+1)^(s_j): w0^(s1-1) w2 ... w8."""
    if not s:
        raise ValueError("composition must be nonempty")
    word = []
    for j, sj in enumerate(s):
        word.extend([W0] * (sj - 1))
        word.append(W2 if j + 1 < len(s) else W8)
    return tuple(word)


def word_length_bounds(spec: SeriesSpec) -> tuple:
    """Admissible word lengths {|s|, ..} for the bookkeeping invariant."""
    base, _ = spec.aliased_to_e()
    w = base.weight
    if base.binom_power == 1:
        return (w, w + 1) if base.factors[0][0] == OM else (w,)
    return (w, w + 1, w + 2) if base.factors[0][0] == OM else (w,)
