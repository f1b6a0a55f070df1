"""Change of variables t -> (1-u^2)/(1+u^2) with path reversal.

The substitution maps the omega letters on (0,1)_t to exact Q[i]-combinations
of x-alphabet letters on (0,1)_u:

    w0  -> y~             = x-i + xi - x-1 - x1
    w1  -> i (x-i - xi)
    w2  -> z~             = -a - x-i - xi
    w3  -> x-1 - x1
    w8  -> -a
    w20 -> y~ + z~        = -a - x-1 - x1
    w5  -> q+i + q-i      (second order, native mode only)
    wdt -> i (q+i - q-i)

Since u = lambda(t) = sqrt((1-t)/(1+t)) is decreasing, the path 0 -> x in t
runs 1 -> lambda(x) in u; restoring the increasing orientation reverses the
word and contributes the sign (-1)^len.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .gaussian import GaussianRational, I as G_I, ONE as G_ONE
from .words import (A, D_M1_1, D_MI_I, NEG_A, QDIFF, QSUM, W0, W1, W2, W3, W5,
                    W8, W20, WDT, X1, YTIL, YZTIL, ZTIL, CompositeLetter,
                    XLetter, expand_composites, is_admissible, parts_of,
                    reverse_with_sign, word_str)

# letter images; the scalar factor of the w1/wdt images is kept inside the
# composite so that words stay letter-for-letter
PHI = {
    W0: YTIL,
    W1: CompositeLetter("i*d(-i,i)", tuple((G_I * c, l) for c, l in D_MI_I.parts)),
    W2: ZTIL,
    W3: D_M1_1,
    W8: NEG_A,
    W20: YZTIL,
    W5: QSUM,
    WDT: QDIFF,
}


def lambda_lower_limit(x: mpfr) -> mpfr:
    """lambda(x) = sqrt((1-x)/(1+x)); lambda(1) = 0, strictly decreasing."""
    return gmpy2.sqrt((1 - x) / (1 + x))


@dataclass(frozen=True)
class CovTerm:
    """scalar * prefactor(x) * integral_{lambda(x)}^1 of the x-alphabet word."""

    scalar: GaussianRational
    prefactor: str
    word: tuple  # of composite/monomial x letters

    def __str__(self):
        return f"({self.scalar}) [{self.prefactor}] {word_str(self.word)}"


def word_to_x_alphabet(word):
    """Map one omega word: reverse, apply PHI letterwise, sign (-1)^len."""
    sign, rev = reverse_with_sign(word)
    return GaussianRational.of(sign), tuple(PHI[l] for l in rev)


def to_x_alphabet(pi) -> list:
    """Transform a PrefactoredIntegral into CovTerms over [lambda(x), 1]."""
    out = []
    for coeff, pid, word in pi.terms:
        sign, xword = word_to_x_alphabet(word)
        out.append(CovTerm(coeff * sign, pid, xword))
    return out


class InadmissibleWord(RuntimeError):
    pass


def admissible_check(terms) -> dict:
    """Check every expanded monomial of every CovTerm for admissibility.

    Canonical-pipeline output at x=1 must pass: the reversed words start with
    the w1 tail image (monomials x+-i) and end with head-image letters that
    never contain a.  A violation is a pipeline bug, reported loudly.
    """
    n_monomials = 0
    offenders = []
    for term in terms:
        for coeff, mono in expand_composites([(G_ONE, term.word)]):
            n_monomials += 1
            if not is_admissible(mono):
                offenders.append((coeff, mono))
    if offenders:
        raise InadmissibleWord(
            "inadmissible monomials out of the canonical pipeline: "
            + "; ".join(word_str(w) for _, w in offenders[:5]))
    return {"monomials": n_monomials, "admissible": True}
