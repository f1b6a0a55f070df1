"""End-to-end evaluation: normalize -> compile -> change variables -> march.

``evaluate_series`` is the main entry point.  For a spec at 0 < x^2 < 1 every
canonical term is marched over [lambda(x), 1].  At x^2 = 1 the canonical
convergent terms go the same way (or through nested sums with engine="sums"),
while the divergent bundle -- exponent-1 heads produced by head diagonals --
is evaluated as a group at x_k = 1 - 2^-k and extrapolated to x -> 1 in
powers of h = sqrt(1-x) with log h corrections, mirroring the way the paper's
worked example takes its boundary limit.

The result separates the "main" part (origin-0 terms: the input with its
first junction tightened) from the "head-diagonal" part (origin-1 terms: the
n_1 = n_2 sub-sum), which is the S1/S2 split of the worked example.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .compiler import (PrefactoredIntegral, compile_spec, compile_squared,
                       prefactor_value)
from .cov import lambda_lower_limit, to_x_alphabet
from .evaluator import mpl_sum, x_word_integral
from .gaussian import GaussianRational
from .hp import HPComplex, from_fraction, solve_linear, working_digits
from .normalize import SpecCombo, canonicalize
from .series import SeriesSpec, oracle_eval_general, validate
from .words import expand_composites, word_to_li


@dataclass
class EvalResult:
    value: HPComplex
    engine: str
    combo: SpecCombo
    parts: dict  # "main", "head_diagonal", "bundle_limit" (HPComplex or None)
    cmzv: list | None = None
    n_marches: int = 0

    @property
    def real(self):
        return self.value.real


class EvaluationError(RuntimeError):
    pass


def _compile_term(spec: SeriesSpec) -> PrefactoredIntegral:
    if spec.binom_power == 2:
        return compile_squared(spec)
    if abs(spec.x2) == 1:
        return compile_spec(spec)
    return compile_spec(spec)


def _march_prefactored(pi: PrefactoredIntegral, x: mpfr, digits: int,
                       check=True):
    """March all terms of a prefactored integral at the point x."""
    lam = mpfr(0) if x == 1 else lambda_lower_limit(x)
    total = mpc(0)
    err = 0.0
    n = 0
    for term in to_x_alphabet(pi):
        pf = prefactor_value(term.prefactor, x)
        mv = x_word_integral(term.word, lam, digits, check=check)
        scale = max(float(abs(pf)) * float(abs(term.scalar.to_mpc())), 1.0)
        total += term.scalar.to_mpc() * pf * mv.value
        err += mv.err * scale
        n += 1
    return total, err, n


def cmzv_expression(spec: SeriesSpec) -> list:
    """Convergent canonical part as a combination of level-4 Li indices.

    Returns [(GaussianRational coeff, s, z)]; only defined at x^2 = 1, where
    the surviving prefactors (f1, f3, f5) are all equal to 1.  The divergent
    bundle has no CMZV image here (its regularization is numeric).
    """
    if spec.x2 != 1:
        raise EvaluationError("CMZV lowering is defined at x^2 = 1 only")
    combo = canonicalize(spec)
    if combo.product_terms:
        raise EvaluationError("product diagonals have no CMZV image here")
    acc: dict = {}
    for t in combo.terms:
        pi = _compile_term(t.spec)
        for cov in to_x_alphabet(pi):
            if cov.prefactor not in ("f1", "f3", "f5"):
                raise EvaluationError("singular prefactor on a convergent term")
            for coeff, mono in expand_composites([(cov.scalar, cov.word)]):
                s, z = word_to_li(mono)
                acc[(s, z)] = acc.get((s, z), GaussianRational()) + coeff * t.coeff
    out = [(c, s, z) for (s, z), c in acc.items() if c]
    out.sort(key=lambda e: (len(e[1]), e[1], tuple(str(x) for x in e[2])))
    return out


def _limit_extrapolate(samples):
    """Extrapolate B(h) -> B(0) with the model B + sum h^j log^q h.

    The columns span an enormous dynamic range at small h, so the solve runs
    at elevated precision with unit-scaled columns; the limit coefficient
    (constant column, scale 1) is unaffected by the scaling.
    """
    nb = len(samples)
    basis = [(0, 0)]
    j, q = 1, 0
    while len(basis) < nb:
        basis.append((j, q))
        if q == 0:
            q = 1
        elif q == 1 and j >= 2 and nb >= 16:
            q = 2
        else:
            j, q = j + 1, 0

    def solve(rows):
        n = len(rows)
        A, rhs = [], []
        for h, val in rows:
            lh = gmpy2.log(h)
            A.append([mpfr(1) if jj == 0 else h ** jj * lh ** qq
                      for jj, qq in basis[:n]])
            rhs.append(val)
        scales = [max(abs(A[r][c]) for r in range(n)) for c in range(n)]
        for r in range(n):
            for c in range(n):
                A[r][c] /= scales[c]
        return solve_linear(A, rhs)[0] / scales[0]

    old = gmpy2.get_context().precision
    try:
        gmpy2.get_context().precision = old * 3 + 200
        full = solve(samples)
        trimmed = solve(samples[1:])
    finally:
        gmpy2.get_context().precision = old
    return full, float(abs(full - trimmed))


def _limit_schedule(digits: int):
    if digits <= 20:
        return tuple(range(4, 17))
    if digits <= 30:
        return tuple(range(6, 26))
    return tuple(range(8, 32))


def _bundle_limit(combo: SpecCombo, digits: int, limit_ks):
    """Grouped x -> 1 limit of the divergent bundle at x_k = 1 - 2^-k."""
    bundle_digits = max(24, digits + 8)
    n = 0
    with working_digits(bundle_digits + 12):
        pis = [_compile_term(t.spec.with_x2(Fraction(1, 2))).scaled(t.coeff)
               for t in combo.divergent]
        samples = []
        for k in limit_ks:
            xk = 1 - mpfr(2) ** (-k)
            h = gmpy2.sqrt(1 - xk)
            val = mpc(0)
            for pi in pis:
                v, _, m = _march_prefactored(pi, xk, bundle_digits, check=False)
                val += v
                n += m
            samples.append((h, val))
        limit, err = _limit_extrapolate(samples)
    return HPComplex(limit, err * 4 + 10.0 ** (-digits + 2)), n


def _product_term_value(pt, digits) -> HPComplex:
    if pt.coeff.im:
        raise EvaluationError("product diagonals expect rational coefficients")
    val = oracle_eval_general(pt.idx_factors(), pt.junctions, pt.x2,
                              pt.binom_power, digits)
    factor = from_fraction(pt.coeff.re)
    return HPComplex(mpc(val.value * factor), val.err * abs(float(factor)))


def evaluate_series(spec: SeriesSpec, digits: int = 40, engine: str = "march",
                    limit_ks=None) -> EvalResult:
    """Evaluate a validated spec through the compiler pipeline.

    engine: "march" (default) integrates the x-alphabet words; "sums"
    evaluates the CMZV expression by nested summation (x^2 = 1, no bundle
    or product terms); "both" runs both and cross-checks.  A divergent
    bundle always goes through limit mode.
    """
    bad = validate(spec)
    if bad:
        raise ValueError("invalid spec: " + "; ".join(bad))
    if engine not in ("march", "sums", "both"):
        raise ValueError("engine must be march, sums or both")
    combo = canonicalize(spec)
    n_marches = 0
    with working_digits(digits + 10):
        x = gmpy2.sqrt(from_fraction(spec.x2))
        err = 0.0
        const_diag = combo.constant_diag
        const_main = combo.constant - const_diag
        part_main = const_main.to_mpc()
        part_diag = const_diag.to_mpc()

        sums_conv = None
        if engine in ("sums", "both"):
            sums_conv = mpc(0)
            for coeff, s, z in cmzv_expression(spec):
                li = mpl_sum(s, z, digits)
                sums_conv += coeff.to_mpc() * li.value
                err += li.err

        march_conv = None
        if engine in ("march", "both") or combo.divergent or combo.product_terms:
            march_conv = mpc(0)
            for t in combo.terms:
                pi = _compile_term(t.spec).scaled(t.coeff)
                val, e, m = _march_prefactored(pi, x, digits)
                march_conv += val
                err += e
                n_marches += m
                if t.origin:
                    part_diag += val
                else:
                    part_main += val

        conv = sums_conv if engine == "sums" else march_conv
        if engine == "both":
            gap = float(abs(march_conv - sums_conv))
            if gap > max(1000 * err, 10.0 ** (-digits + 6)):
                raise EvaluationError(
                    f"engine disagreement: march={march_conv} sums={sums_conv} gap={gap}")
        total = const_main.to_mpc() + const_diag.to_mpc()
        if conv is not None:
            total += conv

        for pt in combo.product_terms:
            v = _product_term_value(pt, digits)
            total += v.value
            err += v.err
            if pt.origin:
                part_diag += v.value
            else:
                part_main += v.value

        bundle_value = None
        if combo.divergent:
            ks = limit_ks if limit_ks is not None else _limit_schedule(digits)
            bundle_value, m = _bundle_limit(combo, digits, ks)
            total += bundle_value.value
            err += bundle_value.err
            part_diag += bundle_value.value
            n_marches += m

        parts = {
            "main": HPComplex(part_main, err),
            "head_diagonal": HPComplex(part_diag, err),
            "bundle_limit": bundle_value,
        }
        return EvalResult(HPComplex(total, err + 10.0 ** (-digits + 2)),
                          engine, combo, parts, None, n_marches)
