"""Words over 1-form alphabets with Gaussian-rational coefficients.

Two alphabets appear in the pipeline:

* the omega alphabet of forms on (0,1) in the ``t`` variable::

      w0 = dt/t              w1 = dt/sqrt(1-t^2)    w2 = t dt/(1-t^2)
      w3 = dt/(t sqrt(1-t^2))  w5 = t dt/sqrt(1-t^2)  w8 = dt/(1-t^2)
      w20 = dt/(t(1-t^2)) = w0 + w2                  wdt = dt

* the x alphabet after the substitution t -> (1-u^2)/(1+u^2)::

      a = du/u     x@xi = du/(xi - u)   xi in {1,-1,i,-i}
                   q@xi = du/(xi - u)^2 xi in {i,-i}

  plus composite letters (exact Q[i]-combinations of the monomials) that the
  compiler keeps unexpanded for as long as possible, since expansion is
  exponential in the weight while the numeric march handles composites at the
  same cost.

Words are plain tuples of letters; a WordSum is a canonicalized list of
(coefficient, word) pairs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from .gaussian import (FOURTH_ROOTS, GaussianRational, I, MINUS_I, MINUS_ONE,
                       ONE, ZERO)

# omega letters are interned strings
W0, W1, W2, W3, W5, W8, W20, WDT = "w0", "w1", "w2", "w3", "w5", "w8", "w20", "wdt"
OMEGA_LETTERS = (W0, W1, W2, W3, W5, W8, W20, WDT)

# expansion rule for the composite omega letter
W20_EXPANSION = (W0, W2)


@dataclass(frozen=True)
class XLetter:
    """Monomial x-alphabet letter: a, x@pole, or q@pole (second order)."""

    kind: str  # "a" | "x" | "q"
    pole: GaussianRational | None = None

    def __post_init__(self):
        if self.kind == "a":
            if self.pole is not None:
                raise ValueError("letter a carries no pole parameter")
        elif self.kind == "x":
            if self.pole not in FOURTH_ROOTS:
                raise ValueError("x-letter pole must be a 4th root of unity")
        elif self.kind == "q":
            if self.pole not in (I, MINUS_I):
                raise ValueError("q-letter pole must be +-i")
        else:
            raise ValueError(f"unknown letter kind {self.kind!r}")

    @property
    def tag(self) -> str:
        if self.kind == "a":
            return "a"
        names = {ONE: "+1", MINUS_ONE: "-1", I: "+i", MINUS_I: "-i"}
        return f"{self.kind}{names[self.pole]}"

    def __str__(self):
        return self.tag

    __repr__ = __str__


A = XLetter("a")
X1 = XLetter("x", ONE)
XM1 = XLetter("x", MINUS_ONE)
XI = XLetter("x", I)
XMI = XLetter("x", MINUS_I)
QI = XLetter("q", I)
QMI = XLetter("q", MINUS_I)

_X_BY_TAG = {l.tag: l for l in (A, X1, XM1, XI, XMI, QI, QMI)}


@dataclass(frozen=True)
class CompositeLetter:
    """A named exact combination of monomial x-letters, used as one letter."""

    name: str
    parts: tuple  # of (GaussianRational, XLetter)

    @property
    def tag(self) -> str:
        return self.name

    def __str__(self):
        return self.name

    __repr__ = __str__


def parts_of(letter):
    """Monomial decomposition of any x-alphabet letter."""
    if isinstance(letter, CompositeLetter):
        return letter.parts
    return ((ONE, letter),)


# composite letters produced by the change of variables
YTIL = CompositeLetter("y~", ((ONE, XMI), (ONE, XI), (MINUS_ONE, XM1), (MINUS_ONE, X1)))
ZTIL = CompositeLetter("z~", ((MINUS_ONE, A), (MINUS_ONE, XMI), (MINUS_ONE, XI)))
D_MI_I = CompositeLetter("d(-i,i)", ((ONE, XMI), (MINUS_ONE, XI)))
D_M1_1 = CompositeLetter("d(-1,1)", ((ONE, XM1), (MINUS_ONE, X1)))
YZTIL = CompositeLetter("y~+z~", ((MINUS_ONE, A), (MINUS_ONE, XM1), (MINUS_ONE, X1)))
QSUM = CompositeLetter("q~", ((ONE, QI), (ONE, QMI)))
QDIFF = CompositeLetter("dq~", ((I, QI), (MINUS_I, QMI)))
NEG_A = CompositeLetter("-a", ((MINUS_ONE, A),))

COMPOSITES = {c.name: c for c in (YTIL, ZTIL, D_MI_I, D_M1_1, YZTIL, QSUM, QDIFF, NEG_A)}


def x_letter_from_tag(tag: str):
    if tag in _X_BY_TAG:
        return _X_BY_TAG[tag]
    if tag in COMPOSITES:
        return COMPOSITES[tag]
    raise ValueError(f"unknown x-alphabet tag {tag!r}")


def word_str(word) -> str:
    return " ".join(str(l) for l in word) if word else "(empty)"


# ---------------------------------------------------------------------------
# word sums

def wordsum_canonical(pairs):
    """Merge equal words, drop zero coefficients; sorted for determinism."""
    acc = {}
    for coeff, word in pairs:
        word = tuple(word)
        acc[word] = acc.get(word, ZERO) + coeff
    out = [(c, w) for w, c in acc.items() if c]
    out.sort(key=lambda cw: (len(cw[1]), tuple(str(l) for l in cw[1])))
    return out


def wordsum_scale(ws, factor):
    return [(c * factor, w) for c, w in ws]


def wordsum_add(*sums):
    pairs = []
    for s in sums:
        pairs.extend(s)
    return wordsum_canonical(pairs)


# ---------------------------------------------------------------------------
# shuffle product

@functools.lru_cache(maxsize=1 << 16)
def _shuffle_words(u: tuple, v: tuple):
    if not u:
        return ((1, v),)
    if not v:
        return ((1, u),)
    out = {}
    for mult, w in _shuffle_words(u[1:], v):
        key = (u[0],) + w
        out[key] = out.get(key, 0) + mult
    for mult, w in _shuffle_words(u, v[1:]):
        key = (v[0],) + w
        out[key] = out.get(key, 0) + mult
    return tuple((m, w) for w, m in out.items())


def shuffle(u, v):
    """Shuffle product of two words -> WordSum with integer multiplicities."""
    return wordsum_canonical(
        (GaussianRational.of(m), w) for m, w in _shuffle_words(tuple(u), tuple(v)))


def shuffle_sums(ws1, ws2):
    pairs = []
    for c1, w1 in ws1:
        for c2, w2 in ws2:
            for m, w in _shuffle_words(tuple(w1), tuple(w2)):
                pairs.append((c1 * c2 * m, w))
    return wordsum_canonical(pairs)


def reverse_with_sign(word):
    """Path reversal: returns ((-1)^len, reversed word)."""
    return (1 if len(word) % 2 == 0 else -1), tuple(reversed(word))


# ---------------------------------------------------------------------------
# composite expansion

def expand_composites(ws):
    """Multilinear expansion of composite letters into monomial words."""
    pairs = []
    for coeff, word in ws:
        expanded = [(coeff, ())]
        for letter in word:
            parts = parts_of(letter)
            expanded = [(c * pc, w + (pl,)) for c, w in expanded for pc, pl in parts]
        pairs.extend(expanded)
    return wordsum_canonical(pairs)


def expand_word(word):
    return expand_composites([(ONE, word)])


# ---------------------------------------------------------------------------
# regularized decomposition  w = sum c_{p,q} x1^(sh p) sh w_{p,q} sh a^(sh q)

def _factorial(n: int) -> Fraction:
    out = Fraction(1)
    for k in range(2, n + 1):
        out *= k
    return out


def _strip_leading(ws):
    """Rewrite a WordSum as {p: WordSum with first letter != x1}."""
    out: dict = {}
    queue = list(ws)
    while queue:
        coeff, word = queue.pop()
        p = 0
        while p < len(word) and word[p] == X1:
            p += 1
        if p == 0:
            out.setdefault(0, []).append((coeff, word))
            continue
        v = word[p:]
        inv = coeff / _factorial(p)
        out.setdefault(p, []).append((inv, v))
        sh = [(ONE, v)]
        for _ in range(p):
            sh = shuffle_sums([(ONE, (X1,))], sh)
        for c, w in sh:
            if w != word:
                queue.append((-inv * c, w))
    return {p: wordsum_canonical(v) for p, v in out.items() if wordsum_canonical(v)}


def _strip_trailing(ws):
    """Rewrite a WordSum as {q: WordSum with last letter != a}."""
    out: dict = {}
    queue = list(ws)
    while queue:
        coeff, word = queue.pop()
        q = 0
        while q < len(word) and word[len(word) - 1 - q] == A:
            q += 1
        if q == 0:
            out.setdefault(0, []).append((coeff, word))
            continue
        v = word[: len(word) - q]
        inv = coeff / _factorial(q)
        out.setdefault(q, []).append((inv, v))
        sh = [(ONE, v)]
        for _ in range(q):
            sh = shuffle_sums(sh, [(ONE, (A,))])
        for c, w in sh:
            if w != word:
                queue.append((-inv * c, w))
    return {q: wordsum_canonical(v) for q, v in out.items() if wordsum_canonical(v)}


def reg_decompose(word):
    """Decompose a monomial word over the divergent end-letters.

    Returns {(p, q): WordSum of admissible words} such that formally

        w = sum_{p,q} x1^(shuffle p)/p! sh ( ... ) --- i.e. T1^p T0^q coefficients

    with every coefficient word admissible (no leading x1, no trailing a).
    The decomposition is the shuffle-regularization with T1 = integral of x1
    and T0 = integral of a carried as formal symbols.
    """
    out: dict = {}
    for p, ws_p in _strip_leading([(ONE, tuple(word))]).items():
        for q, ws_pq in _strip_trailing(ws_p).items():
            if ws_pq:
                out[(p, q)] = wordsum_add(out.get((p, q), []), ws_pq)
    return {k: v for k, v in out.items() if v}


def is_admissible(word) -> bool:
    """No leading x1 (pole at 1), no trailing a (pole at 0)."""
    if not word:
        return True
    return word[0] != X1 and word[-1] != A


# ---------------------------------------------------------------------------
# word <-> nested-sum index mapping

class NotSumForm(ValueError):
    pass


def word_to_li(word):
    """Map an admissible monomial word a^(s1-1) x@xi1 ... to (s, z).

    z1 = xi1^(-1) and z_j = xi_{j-1}/xi_j; the inverse of li_to_word.
    """
    word = tuple(word)
    if not word:
        raise NotSumForm("empty word has no sum form")
    if any(l.kind == "q" for l in word):
        raise NotSumForm("second-order letters have no nested-sum form")
    if word[-1] == A:
        raise NotSumForm("trailing a: not admissible")
    if word[0] == X1:
        raise NotSumForm("leading x@+1: not admissible")
    s, xi = [], []
    run = 0
    for letter in word:
        if letter == A:
            run += 1
        else:
            s.append(run + 1)
            xi.append(letter.pole)
            run = 0
    z = []
    prev = ONE
    for x in xi:
        z.append(prev / x)
        prev = x
    return tuple(s), tuple(z)


def li_to_word(s, z):
    xi = []
    cur = ONE
    for zj in z:
        cur = cur / zj
        xi.append(cur)
    word = []
    for sj, x in zip(s, xi):
        word.extend([A] * (sj - 1))
        word.append(XLetter("x", x))
    return tuple(word)
