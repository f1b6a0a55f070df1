"""Rewriting of series specs into canonical combinations.

Canonical means: every junction is in native position (weak below an o+
factor, strict below e and o-, final junction included) and o- appears only
as the head factor.  Rewriting uses three exact moves:

* junction exchange: switching a junction between strict and weak costs a
  diagonal term in which the two adjacent indices collide; the collided index
  carries a product of two linear forms, which partial fractions split into
  single forms of depth one less.

* o- index shift: for an o- factor at position j >= 2 (with the junction
  below it already strict), substituting n_j -> n_j + 1 turns the factor into
  o+, turns the junction below weak, and either tightens a weak junction
  above into strict (no cost) or, if the junction above was strict, emits a
  diagonal merging position j into j-1.

* final-junction exchange: splitting off the n_d = 0 term, a constant factor
  form(0)^(-s) (1 for o+, (-1)^s for o-) on a spec of depth d-1.

At x^2 = 1 partial fractions of head diagonals can produce exponent-1 heads
that diverge in isolation; those terms are returned as a grouped bundle for
limit-mode evaluation rather than split further.  Diagonal terms spawned at
junction 1 are tagged origin=1 ("head-diagonal part"), which is exactly the
n_1 = n_2 sub-sum of the input; evaluate_series reports the two parts
separately.

Rewriting terminates because (depth, #o- at position >= 2, #non-native
junctions) decreases lexicographically at every move.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .gaussian import GaussianRational, ONE as G_ONE, ZERO as G_ZERO
from .series import (E, N, OM, OP, STRICT, WEAK, SeriesSpec, form_value,
                     validate)

# constant offset of each form as 2n + c
_OFFSET = {E: 0, OP: 1, OM: -1}


def native_junction(form: str) -> str:
    return WEAK if form == OP else STRICT


@dataclass(frozen=True)
class LinearFormPair:
    """Two distinct affine forms 2n+c sharing one index, with exponents."""

    form_u: str
    s: int
    form_v: str
    t: int

    def __post_init__(self):
        if self.form_u not in _OFFSET or self.form_v not in _OFFSET:
            raise ValueError("forms must be e / o+ / o- (pre-scale n-aliases)")
        if self.form_u == self.form_v:
            raise ValueError("identical forms: merge exponents instead")


def partial_fraction(pair: LinearFormPair):
    """Exact decomposition 1/(U^s V^t) = sum a_i/U^i + sum b_j/V^j.

    U, V differ by the nonzero constant c = V - U; the identity follows by
    iterating (V-U)/(U^s V^t) = 1/(U^s V^(t-1)) - 1/(U^(s-1) V^t).
    """
    c = Fraction(_OFFSET[pair.form_v] - _OFFSET[pair.form_u])

    def rec(s, t):
        if s == 0:
            return {(pair.form_v, t): Fraction(1)}
        if t == 0:
            return {(pair.form_u, s): Fraction(1)}
        out: dict = {}
        for key, val in rec(s, t - 1).items():
            out[key] = out.get(key, Fraction(0)) + val / c
        for key, val in rec(s - 1, t).items():
            out[key] = out.get(key, Fraction(0)) - val / c
        return out

    dec = rec(pair.s, pair.t)
    return [(GaussianRational(q), form, exp) for (form, exp), q in sorted(dec.items()) if q]


@dataclass(frozen=True)
class ComboTerm:
    coeff: GaussianRational
    spec: SeriesSpec
    origin: int = 0  # 1 = descended from a junction-1 (head) diagonal


@dataclass(frozen=True)
class ProductTerm:
    """Unsplit diagonal with several forms on the head index (b^2 route)."""

    coeff: GaussianRational
    head_factors: tuple  # ((form, exp), ...) all on index 1
    rest: tuple  # remaining (form, exp) factors
    junctions: tuple
    binom_power: int
    x2: Fraction
    origin: int = 0

    def idx_factors(self):
        return [list(self.head_factors)] + [[fs] for fs in self.rest]


@dataclass
class SpecCombo:
    input_spec: SeriesSpec
    terms: list = field(default_factory=list)  # ComboTerm, individually convergent
    divergent: list = field(default_factory=list)  # ComboTerm bundle (limit mode)
    product_terms: list = field(default_factory=list)  # ProductTerm (direct sums)
    constant: GaussianRational = G_ZERO
    constant_diag: GaussianRational = G_ZERO  # share of constant with origin 1

    @property
    def contains_divergent_piece(self) -> bool:
        return bool(self.divergent)

    def all_series_terms(self):
        return list(self.terms) + list(self.divergent)

    def to_json(self) -> dict:
        return {
            "input": self.input_spec.to_json(),
            "constant": str(self.constant),
            "contains_divergent_piece": self.contains_divergent_piece,
            "terms": [
                {"coeff": str(t.coeff), "spec": t.spec.to_json(), "origin": t.origin}
                for t in self.terms
            ],
            "divergent_bundle": [
                {"coeff": str(t.coeff), "spec": t.spec.to_json(), "origin": t.origin}
                for t in self.divergent
            ],
            "product_terms": [
                {
                    "coeff": str(t.coeff),
                    "head_factors": list(t.head_factors),
                    "rest": list(t.rest),
                    "junctions": list(t.junctions),
                }
                for t in self.product_terms
            ],
        }


class RewriteError(RuntimeError):
    pass


def _find_step(spec: SeriesSpec, allow_shift: bool):
    """Next rewrite move, or None when the spec is canonical.

    Tightening exchanges (weak -> strict) run before weakening ones: a
    weakening at junction j is only safe once every even factor above j is
    protected by the strict junction directly below it, otherwise the
    intermediate spec would pick up a 1/0 chain through n = 0.  Shifts
    tighten the junction above themselves, so they are always safe.
    """
    d = spec.depth
    if allow_shift:
        for j in range(d, 1, -1):
            if spec.factors[j - 1][0] == OM:
                if spec.junctions[j - 1] == WEAK:
                    return ("exchange", j)
                return ("shift", j)
    weakening = None
    for j in range(d, 0, -1):
        form_j = spec.factors[j - 1][0]
        if spec.junctions[j - 1] != native_junction(form_j):
            if spec.junctions[j - 1] == WEAK:
                return ("exchange", j)
            if weakening is None:
                weakening = ("exchange", j)
    return weakening


def _merge_factors(term: ComboTerm, pos: int, fs_a, fs_b, sign: int,
                   junctions: tuple, combo_x2, binom_power, keep_products: bool):
    """Diagonal where the factors fs_a, fs_b share one index at ``pos``.

    Returns (combo_terms, product_terms).  ``junctions`` is the junction
    tuple of the merged (depth d-1) spec; the factor list of the merged spec
    is the original one with positions pos, pos+1 replaced by the merge.
    """
    origin_flag = 1 if pos == 1 else None
    spec0 = term.spec
    rest_before = spec0.factors[: pos - 1]
    rest_after = spec0.factors[pos + 1:]

    def build(factor):
        return SeriesSpec(rest_before + (factor,) + rest_after, junctions,
                          binom_power, combo_x2)

    coeff = term.coeff * sign
    origin = term.origin if origin_flag is None else 1
    if fs_a[0] == fs_b[0]:
        return [ComboTerm(coeff, build((fs_a[0], fs_a[1] + fs_b[1])), origin)], []
    pair = LinearFormPair(fs_a[0], fs_a[1], fs_b[0], fs_b[1])
    pieces = partial_fraction(pair)
    if keep_products and pos == 1:
        # b^2 head merges: splitting can emit pieces that diverge alone,
        # so keep the product form for direct summation
        total = fs_a[1] + fs_b[1]
        min_needed = 3
        if any(exp < min_needed for _, _, exp in pieces):
            pt = ProductTerm(coeff, (fs_a, fs_b), rest_after, junctions,
                             binom_power, combo_x2, origin)
            return [], [pt]
    out = [ComboTerm(coeff * q, build((form, exp)), origin) for q, form, exp in pieces]
    return out, []


def canonicalize(spec: SeriesSpec) -> SpecCombo:
    """Rewrite a validated spec into a canonical Gaussian-rational combo."""
    bad = validate(spec)
    if bad:
        raise ValueError("invalid spec: " + "; ".join(bad))
    base, shift = spec.aliased_to_e()
    combo = SpecCombo(input_spec=spec)
    allow_shift = spec.binom_power == 1
    keep_products = spec.binom_power == 2
    work = [ComboTerm(GaussianRational(Fraction(2 ** shift)), base, 0)]
    guard = 0
    while work:
        guard += 1
        if guard > 100000:
            raise RewriteError("rewrite did not terminate")
        term = work.pop()
        sp = term.spec
        step = _find_step(sp, allow_shift)
        if step is None:
            _classify(combo, term)
            continue
        kind, j = step
        d = sp.depth
        if kind == "exchange":
            cur = sp.junctions[j - 1]
            flipped = sp.junctions[: j - 1] + (STRICT if cur == WEAK else WEAK,) + sp.junctions[j:]
            main = ComboTerm(term.coeff, replace(sp, junctions=flipped), term.origin)
            # weak = strict + diagonal  =>  diag sign +1 when tightening
            sign = +1 if cur == WEAK else -1
            if j == d:
                form_d, s_d = sp.factors[-1]
                fv = form_value(form_d, 0)
                if fv == 0:
                    raise RewriteError("n_d = 0 with an even form: divergent input")
                q = GaussianRational(Fraction(1, fv ** s_d) if fv > 0
                                     else Fraction((-1) ** s_d))
                if d == 1:
                    combo.constant = combo.constant + term.coeff * q * sign
                    if term.origin:
                        combo.constant_diag = combo.constant_diag + term.coeff * q * sign
                    work.append(main)
                else:
                    tail_spec = SeriesSpec(sp.factors[:-1], sp.junctions[:-1],
                                           sp.binom_power, sp.x2)
                    work.append(main)
                    work.append(ComboTerm(term.coeff * q * sign, tail_spec, term.origin))
            else:
                merged_junctions = sp.junctions[: j - 1] + sp.junctions[j:]
                diag_terms, prods = _merge_factors(
                    term, j, sp.factors[j - 1], sp.factors[j], sign,
                    merged_junctions, sp.x2, sp.binom_power, keep_products)
                work.append(main)
                work.extend(diag_terms)
                combo.product_terms.extend(prods)
        else:  # shift at position j >= 2; junction below is strict
            factors = list(sp.factors)
            s_j = factors[j - 1][1]
            factors[j - 1] = (OP, s_j)
            junctions = list(sp.junctions)
            junctions[j - 1] = WEAK
            above = junctions[j - 2]
            if above == WEAK:
                junctions[j - 2] = STRICT
                work.append(ComboTerm(term.coeff, SeriesSpec(
                    tuple(factors), tuple(junctions), sp.binom_power, sp.x2), term.origin))
            else:
                work.append(ComboTerm(term.coeff, SeriesSpec(
                    tuple(factors), tuple(junctions), sp.binom_power, sp.x2), term.origin))
                # n_{j-1} = n_j diagonal keeps the original o- form
                merged_junctions = sp.junctions[: j - 2] + sp.junctions[j - 1:]
                diag_terms, prods = _merge_factors(
                    term, j - 1, sp.factors[j - 2], (OM, s_j), -1,
                    merged_junctions, sp.x2, sp.binom_power, keep_products)
                work.extend(diag_terms)
                combo.product_terms.extend(prods)
    _merge_like_terms(combo)
    return combo


def _classify(combo: SpecCombo, term: ComboTerm):
    sp = term.spec
    s1 = sp.factors[0][1]
    if abs(sp.x2) == 1:
        need = 2 if sp.binom_power == 1 else 3
        if s1 < need:
            combo.divergent.append(term)
            return
    combo.terms.append(term)


def _merge_like_terms(combo: SpecCombo):
    def merge(terms):
        acc: dict = {}
        for t in terms:
            key = (t.spec, t.origin)
            acc[key] = acc.get(key, G_ZERO) + t.coeff
        return [ComboTerm(c, spec, origin)
                for (spec, origin), c in acc.items() if c]

    combo.terms = sorted(merge(combo.terms),
                         key=lambda t: (t.spec.depth, t.spec.to_dsl(), t.origin))
    combo.divergent = sorted(merge(combo.divergent),
                             key=lambda t: (t.spec.depth, t.spec.to_dsl(), t.origin))


def is_canonical(spec: SeriesSpec) -> bool:
    base, _ = spec.aliased_to_e()
    return _find_step(base, allow_shift=spec.binom_power == 1) is None
