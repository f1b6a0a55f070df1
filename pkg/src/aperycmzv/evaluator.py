"""Numeric engines: iterated-integral marches and nested polylog sums.

The march evaluates an iterated integral over [lo, hi] through its triangular
first-order system I_k' = f_k I_{k+1}, I_{m+1} = 1, I_k(lo) = 0.  All
integrands here are either rational with poles in {0, +-1, +-i} (x-alphabet
words in the u variable) or trigonometric with poles on (pi/2) Z (omega words
in the arcsine variable theta), so the march is done entirely with truncated
local expansions:

* at the lower endpoint (when it is the singular anchor 0) every I_k vanishes
  and stays a plain power series with valuation >= 1, even through letters
  with a 1/t pole -- logs cannot appear there;

* across the interior, Taylor steps of half the distance to the nearest pole;

* at a singular upper endpoint (u = 1 or theta = pi/2) the I_k develop
  log-power behaviour, so the last window uses power-times-log series in the
  local variable, with integration constants matched against the marched
  values at the window edge.

Truncation order P is chosen so that (window ratio)^P is below the target,
and the error estimate comes from re-running at reduced order.

The nested-sum engine (mpl_sum) evaluates multiple polylogarithms by direct
summation with an O(N * depth) inner-prefix recursion: geometric truncation
for |z_1| < 1; extrapolated partial sums on the unit circle (the 4-periodic
characters make the block-averaged remainder smooth in 1/N).  It shares
nothing with the march, which is what makes the engine-agreement checks
meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .gaussian import GaussianRational, ONE as G_ONE, ZERO as G_ZERO
from .hp import (HPComplex, HPReal, TailModel, accelerate, from_fraction,
                 geometric_checkpoints, solve_linear, working_digits)
from .words import (A, W0, W1, W2, W3, W5, W8, W20, WDT, XLetter,
                    expand_composites, parts_of, word_str)

# ---------------------------------------------------------------------------
# truncated power series helpers (plain lists of mpc)


def _poly_mul(a, b, P):
    n = min(len(a) + len(b) - 1, P)
    out = [mpc(0)] * n
    for i, ai in enumerate(a):
        if i >= P:
            break
        if ai == 0:
            continue
        top = min(len(b), n - i)
        for j in range(top):
            out[i + j] += ai * b[j]
    return out


def _poly_inv(a, P):
    """1/a for a power series with a[0] != 0."""
    inv0 = 1 / a[0]
    out = [inv0]
    for n in range(1, P):
        acc = mpc(0)
        for k in range(1, min(n, len(a) - 1) + 1):
            acc += a[k] * out[n - k]
        out.append(-inv0 * acc)
    return out


def _poly_eval(a, v):
    acc = mpc(0)
    for c in reversed(a):
        acc = acc * v + c
    return acc


def _poly_antider(a, P):
    out = [mpc(0)] * min(len(a) + 1, P + 1)
    for k in range(len(out) - 1):
        out[k + 1] = a[k] / (k + 1)
    return out


# ---------------------------------------------------------------------------
# log-power series: list of layers, layer q multiplies log(v)^q


class _LogSeries:
    __slots__ = ("layers",)

    def __init__(self, layers):
        self.layers = layers  # list of coefficient lists

    @staticmethod
    def constant(c):
        return _LogSeries([[mpc(c)]])

    def eval(self, v, logv):
        acc = mpc(0)
        lp = mpc(1)
        for q, layer in enumerate(self.layers):
            if q:
                lp = lp * logv
            acc += _poly_eval(layer, v) * lp
        return acc


def _letter_integrate(F: _LogSeries, pole, g, P):
    """Anti-derivative of (pole/v + g(v)) * F(v), zero constant term.

    Integration of v^k log^q v reduces log powers via
    int v^k L^q = v^(k+1)/(k+1) L^q - q/(k+1) int v^k L^(q-1)   (k >= 0),
    and the pole against a layer constant raises the log power:
    int c/v L^q dv = c L^(q+1)/(q+1).
    """
    nq = len(F.layers)
    integrands = []
    for layer in F.layers:
        term = _poly_mul(g, layer, P) if g else []
        if pole != 0 and len(layer) > 1:
            term = _poly_add(term, [pole * c for c in layer[1:]])
        integrands.append(term)
    out_layers = [[] for _ in range(nq + 2)]
    carry = []
    for q in range(nq - 1, -1, -1):
        cur = _poly_add(integrands[q], carry)
        out_layers[q] = _poly_antider(cur, P)
        carry = [-q * c / (k + 1) for k, c in enumerate(cur)] if q > 0 else []
    if pole != 0:
        for q, layer in enumerate(F.layers):
            if layer and layer[0] != 0:
                lay = out_layers[q + 1]
                if not lay:
                    out_layers[q + 1] = lay = [mpc(0)]
                lay[0] += pole * layer[0] / (q + 1)
    while len(out_layers) > 1 and not any(c != 0 for c in out_layers[-1]):
        out_layers.pop()
    return _LogSeries(out_layers)


def _poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return out


# ---------------------------------------------------------------------------
# letter frames


class XFrames:
    """Expansions of x-alphabet letters (poles in {0, +-1, +-i}) in u."""

    anchor_left = True

    def __init__(self, letters, right_singular=True):
        self.letters = list(letters)
        self.anchor_right_singular = right_singular

    @staticmethod
    def _parts(letter):
        return [(c.to_mpc(), l) for c, l in parts_of(letter)]

    def left_radius(self):
        return mpfr(1)

    def right_radius(self):
        return mpfr(1)

    def radius(self, c):
        return min(c, 1 - c)

    def left_frame(self, letter, P):
        pole = mpc(0)
        coeffs = [mpc(0)] * P
        for co, l in self._parts(letter):
            if l.kind == "a":
                pole += co
            else:
                # 1/(xi - t) = sum t^k / xi^(k+1); q-letters differentiate it
                inv = 1 / l.pole.to_mpc()
                if l.kind == "x":
                    acc = inv
                    for k in range(P):
                        coeffs[k] += co * acc
                        acc *= inv
                else:
                    acc = inv * inv
                    for k in range(P):
                        coeffs[k] += co * (k + 1) * acc
                        acc *= inv
        return pole, coeffs

    def center_frame(self, letter, c, P):
        coeffs = [mpc(0)] * P
        for co, l in self._parts(letter):
            if l.kind == "a":
                base = mpc(c)
                acc = 1 / base
                for k in range(P):
                    coeffs[k] += co * acc
                    acc = -acc / base
            else:
                den = l.pole.to_mpc() - c
                acc = 1 / den
                if l.kind == "x":
                    for k in range(P):
                        coeffs[k] += co * acc
                        acc /= den
                else:
                    acc = acc / den
                    for k in range(P):
                        coeffs[k] += co * (k + 1) * acc
                        acc /= den
        return coeffs

    def right_frame(self, letter, P):
        """Integrand as a form in w = 1-u (orientation folded in: -f(1-w))."""
        pole = mpc(0)
        coeffs = [mpc(0)] * P
        for co, l in self._parts(letter):
            if l.kind == "a":
                for k in range(P):
                    coeffs[k] -= co  # -1/(1-w) = -sum w^k
            else:
                xi = l.pole.to_mpc()
                if l.kind == "x" and xi == 1:
                    pole -= co
                    continue
                den = xi - 1
                acc = 1 / den
                if l.kind == "x":
                    for k in range(P):
                        coeffs[k] -= co * acc
                        acc = -acc / den
                else:
                    acc = acc / den
                    for k in range(P):
                        coeffs[k] -= co * (k + 1) * acc
                        acc = -acc / den
        return pole, coeffs


def _sin_cos_series(P):
    s = [mpc(0)] * P
    c = [mpc(0)] * P
    fact = mpfr(1)
    for k in range(P):
        if k:
            fact *= k
        if k % 2 == 0:
            c[k] = mpc((-1) ** (k // 2)) / fact
        else:
            s[k] = mpc((-1) ** ((k - 1) // 2)) / fact
    return s, c


class ThetaFrames:
    """Expansions of omega letters as trig forms of theta = arcsin t.

    w0 = cot, w1 = 1, w2 = tan, w3 = csc, w5 = sin, w8 = sec,
    w20 = 1/(sin cos), wdt = cos.  Poles at theta = 0 (cot, csc, w20) and
    theta = pi/2 (tan, sec, w20).
    """

    anchor_left = True

    def __init__(self, letters, right_singular=False):
        self.letters = list(letters)
        self.anchor_right_singular = right_singular
        self._cache = {}

    def left_radius(self):
        return gmpy2.const_pi() / 2

    def right_radius(self):
        return gmpy2.const_pi() / 2

    def radius(self, c):
        return min(c, gmpy2.const_pi() / 2 - c)

    def _sc(self, P):
        key = ("sc", P, gmpy2.get_context().precision)
        if key not in self._cache:
            self._cache[key] = _sin_cos_series(P)
        return self._cache[key]

    def left_frame(self, letter, P):
        """pole/theta + series, from sin = theta*S, S(0)=1."""
        s, c = self._sc(P + 2)
        S = s[1:P + 1]  # sin(theta)/theta
        Sinv = _poly_inv(S, P)
        if letter == W0:  # cot = cos/sin = (1/theta) cos * Sinv
            prod = _poly_mul(c, Sinv, P + 1)
            return mpc(1), prod[1:P + 1]
        if letter == W1:
            return mpc(0), [mpc(1)] + [mpc(0)] * (P - 1)
        if letter == W2:
            cinv = _poly_inv(c, P)
            return mpc(0), _poly_mul(s, cinv, P)
        if letter == W3:  # csc = (1/theta) * Sinv
            return mpc(1), Sinv[1:P + 1] + [mpc(0)]
        if letter == W5:
            return mpc(0), s[:P]
        if letter == W8:
            return mpc(0), _poly_inv(c, P)
        if letter == W20:  # 1/(sin cos) = (1/theta) Sinv * sec
            prod = _poly_mul(Sinv, _poly_inv(c, P + 1), P + 1)
            return mpc(1), prod[1:P + 1]
        if letter == WDT:
            return mpc(0), c[:P]
        raise ValueError(f"unknown omega letter {letter!r}")

    def center_frame(self, letter, cpt, P):
        s0, c0 = gmpy2.sin(cpt), gmpy2.cos(cpt)
        s, c = self._sc(P)
        sin_loc = _poly_add([x * s0 for x in c], [x * c0 for x in s])
        cos_loc = _poly_add([x * c0 for x in c], [-x * s0 for x in s])
        if letter == W0:
            return _poly_mul(cos_loc, _poly_inv(sin_loc, P), P)
        if letter == W1:
            return [mpc(1)]
        if letter == W2:
            return _poly_mul(sin_loc, _poly_inv(cos_loc, P), P)
        if letter == W3:
            return _poly_inv(sin_loc, P)
        if letter == W5:
            return sin_loc[:P]
        if letter == W8:
            return _poly_inv(cos_loc, P)
        if letter == W20:
            return _poly_mul(_poly_inv(sin_loc, P), _poly_inv(cos_loc, P), P)
        if letter == WDT:
            return cos_loc[:P]
        raise ValueError(f"unknown omega letter {letter!r}")

    def right_frame(self, letter, P):
        """Form in w = pi/2 - theta, orientation folded: -f(pi/2 - w)."""
        s, c = self._sc(P + 2)
        S = s[1:P + 1]
        Sinv = _poly_inv(S, P)  # w/sin(w) coefficients
        neg = lambda xs: [-x for x in xs]
        if letter == W0:  # cot(pi/2 - w) = tan(w)
            return mpc(0), neg(_poly_mul(s, _poly_inv(c, P), P))
        if letter == W1:
            return mpc(0), [mpc(-1)] + [mpc(0)] * (P - 1)
        if letter == W2:  # tan -> cot(w): pole
            prod = _poly_mul(c, Sinv, P + 1)
            return mpc(-1), neg(prod[1:P + 1])
        if letter == W3:  # csc -> sec(w)
            return mpc(0), neg(_poly_inv(c, P))
        if letter == W5:  # sin -> cos(w)
            return mpc(0), neg(c[:P])
        if letter == W8:  # sec -> csc(w)
            return mpc(-1), neg(Sinv[1:P + 1] + [mpc(0)])
        if letter == W20:
            prod = _poly_mul(Sinv, _poly_inv(c, P + 1), P + 1)
            return mpc(-1), neg(prod[1:P + 1])
        if letter == WDT:  # cos -> sin(w)
            return mpc(0), neg(s[:P])
        raise ValueError(f"unknown omega letter {letter!r}")


# ---------------------------------------------------------------------------
# the march


class MarchError(RuntimeError):
    pass


_RATIO = 0.45
_STEP_FRAC = 0.5


def _terms_for(digits):
    return max(24, int((digits + 10) * math.log(10) / math.log(1 / _RATIO)) + 4)


def _march_once(letters, lo, hi, frames, P, hi_singular):
    m = len(letters)
    if m == 0:
        return mpc(1)
    # geometry: optional left anchored stage, Taylor steps, right window
    if hi_singular:
        t_right = hi - _RATIO * frames.right_radius()
        if t_right <= lo:
            t_right = lo  # window alone covers the interval
    else:
        t_right = hi

    vals = [mpc(0)] * (m + 1)
    vals[m] = mpc(1)  # I_{m+1}
    cur = lo

    if lo == 0:
        t_left = min(_RATIO * frames.left_radius(), t_right)
        polys = [[mpc(1)]]  # local expansion of I_{m+1}
        for k in range(m - 1, -1, -1):
            pole, g = frames.left_frame(letters[k], P)
            F = polys[-1]
            integrand = _poly_mul(g, F, P)
            if pole != 0:
                # valuation >= 1 below the innermost letter keeps this regular
                if F and F[0] != 0:
                    raise MarchError(
                        f"letter {letters[k]} singular at the lower endpoint")
                integrand = _poly_add(integrand, [pole * c for c in F[1:]])
            polys.append(_poly_antider(integrand, P))
        polys = polys[1:][::-1]  # reorder to I_1 .. I_m
        for k in range(m):
            vals[k] = _poly_eval(polys[k], mpc(t_left))
        cur = t_left

    # Taylor steps
    while t_right - cur > 0:
        r = frames.radius(cur)
        step = _STEP_FRAC * r
        if t_right - cur <= step:
            step = t_right - cur
        local = [[mpc(1)]]
        for k in range(m - 1, -1, -1):
            g = frames.center_frame(letters[k], cur, P)
            integrand = _poly_mul(g, local[-1], P)
            F = _poly_antider(integrand, P)
            F[0] = vals[k]
            local.append(F)
        local = local[1:][::-1]
        sv = mpc(step)
        for k in range(m):
            vals[k] = _poly_eval(local[k], sv)
        cur += step

    if not hi_singular:
        return vals[0]

    # right log-power window: w = hi - t, matched at w_match = hi - cur
    w_match = hi - cur
    logw = gmpy2.log(mpc(w_match))
    series = _LogSeries.constant(1)
    C1 = None
    for k in range(m - 1, -1, -1):
        pole, g = frames.right_frame(letters[k], P)
        Phi = _letter_integrate(series, pole, g, P)
        Ck = vals[k] - Phi.eval(mpc(w_match), logw)
        if k == 0:
            # value = I_1(hi): log layers must carry no constant term
            scale = max(abs(Ck), mpfr(1))
            for q in range(1, len(Phi.layers)):
                layer = Phi.layers[q]
                if layer and abs(layer[0]) > scale * mpfr(2) ** (
                        24 - gmpy2.get_context().precision):
                    raise MarchError(
                        f"divergent integral: log^{q} coefficient "
                        f"{layer[0]} survives at the endpoint")
            C1 = Ck
        else:
            Phi.layers[0] = _poly_add(Phi.layers[0], [Ck])
            series = Phi
    return C1


def march_word(letters, lo, hi, frames, digits, check=True) -> HPComplex:
    """Iterated integral of the letter word over [lo, hi]."""
    P = _terms_for(digits)
    with working_digits(digits + 12):
        hi_singular = frames.anchor_right_singular
        val = _march_once(letters, mpfr(lo), mpfr(hi), frames, P, hi_singular)
        if check:
            val2 = _march_once(letters, mpfr(lo), mpfr(hi), frames,
                               max(24, P - max(10, P // 6)), hi_singular)
            err = float(abs(val - val2)) + 10.0 ** (-digits - 4)
        else:
            err = float(max(abs(val), mpfr(1))) * 10.0 ** (-digits - 2)
    return HPComplex(val, err)


def x_word_integral(word, lower, digits, check=True) -> HPComplex:
    """integral_{lower}^1 of an x-alphabet word (composite letters fine)."""
    frames = XFrames(word, right_singular=True)
    return march_word(list(word), lower, mpfr(1), frames, digits, check)


def omega_word_integral(word, x, digits, check=True) -> HPComplex:
    """integral_0^x of an omega word, marched in theta = arcsin t."""
    with working_digits(digits + 12):
        xv = mpfr(x)
        hi_singular = xv == 1
        y = gmpy2.const_pi() / 2 if hi_singular else gmpy2.asin(xv)
    frames = ThetaFrames(word, right_singular=hi_singular)
    return march_word(list(word), 0, y, frames, digits, check)


# ---------------------------------------------------------------------------
# nested polylog sums


class InadmissibleIndex(ValueError):
    pass


def _alternating_cvz(values, digits):
    """Cohen-Villegas-Zagier acceleration of sum (-1)^k a_k, a_k = values[k]."""
    n = len(values)
    d = (3 + 2 * gmpy2.sqrt(mpfr(2))) ** n
    d = (d + 1 / d) / 2
    b = mpfr(-1)
    c = -d
    s = mpfr(0)
    for k in range(n):
        c = b - c
        s += c * values[k]
        b = b * (k + n) * (k - n) / ((k + Fraction(1, 2)) * (k + 1))
    return s / d


def _cvz_terms(digits):
    return int((digits + 6) * math.log(10) / 1.7627471740390859) + 6


def dirichlet_beta(s: int, digits: int) -> mpfr:
    """beta(s) = sum (-1)^k / (2k+1)^s by CVZ acceleration."""
    with working_digits(digits + 10):
        n = _cvz_terms(digits)
        vals = [1 / mpfr(2 * k + 1) ** s for k in range(n)]
        return _alternating_cvz(vals, digits)


def eta(s: int, digits: int) -> mpfr:
    """eta(s) = sum (-1)^(k-1) / k^s."""
    with working_digits(digits + 10):
        n = _cvz_terms(digits)
        vals = [1 / mpfr(k + 1) ** s for k in range(n)]
        return _alternating_cvz(vals, digits)


def _unit_polylog(s: int, z: GaussianRational, digits: int) -> mpc:
    """Li_s(z) for z in {i, -i, -1}, split into alternating pieces."""
    from .gaussian import I as G_I, MINUS_I, MINUS_ONE
    with working_digits(digits + 10):
        if z == MINUS_ONE:
            return mpc(-eta(s, digits))
        even = -eta(s, digits) / mpfr(2) ** s
        odd = dirichlet_beta(s, digits)
        if z == G_I:
            return mpc(even, odd)
        if z == MINUS_I:
            return mpc(even, -odd)
    raise ValueError("unit polylog expects z in {i,-i,-1}")


def mpl_sum(s: tuple, z: tuple, digits: int = 30, mode: str = "auto") -> HPComplex:
    """Multiple polylogarithm Li_{s}(z) by nested summation.

    z entries may be GaussianRational (exact) or complex values with |z| <= 1.
    Admissibility requires (s1, z1) != (1, 1).  mode="truncate" refuses
    s1 = 1 on the unit circle (the plain tail bound needs s1 >= 2); the
    default resolves those conditionally convergent sums by extrapolating
    block-aligned partial sums.
    """
    d = len(s)
    if d != len(z):
        raise ValueError("composition and argument length differ")
    zv = [w.to_mpc() if isinstance(w, GaussianRational) else mpc(w) for w in z]
    with working_digits(digits + 15):
        mags = [abs(w) for w in zv]
        if any(m > 1 + mpfr(2) ** (-20) for m in mags):
            raise ValueError("|z_j| <= 1 required")
        on_circle = mags[0] > 1 - mpfr(2) ** (-20)
        if on_circle and s[0] == 1 and zv[0] == 1:
            raise InadmissibleIndex("Li with (s1, z1) = (1, 1) diverges")
        if on_circle and s[0] == 1 and mode == "truncate":
            raise InadmissibleIndex(
                "s1 = 1 on the unit circle: refuse truncation mode, "
                "defer to the integral engine or mode='auto'")
        if d == 1 and isinstance(z[0], GaussianRational) and on_circle and z[0] != G_ONE:
            return HPComplex(_unit_polylog(s[0], z[0], digits),
                             10.0 ** (-digits - 2))

        if not on_circle:
            # geometric truncation
            r = float(mags[0])
            n_terms = int((digits + 10) * math.log(10) / -math.log(r)) + 30 + 10 * d
            sums = _li_partial_sums(s, zv, [n_terms // 2, n_terms])
            tail = abs(sums[-1][1] - sums[-2][1]) + mpfr(10) ** (-digits - 10)
            return HPComplex(sums[-1][1], float(tail) * 4)

        # remainder model: N^(1-s1) leading for z1 = 1, else an integer
        # ladder from 1 (inner characters can conspire back to trivial);
        # log factors come only from harmonic inner levels (z_j = 1, s_j = 1)
        e0 = Fraction(s[0] - 1) if zv[0] == 1 else Fraction(1)
        logs = min(3, sum(1 for j in range(1, d) if s[j] == 1 and zv[j] == 1))
        if digits <= 16:
            n0, count = 16, 10
        elif digits <= 24:
            n0, count = 32, 12
        elif digits <= 32:
            n0, count = 64, 13
        else:
            n0, count = 128, 14
        n0 *= 1 + logs
        pts = geometric_checkpoints(n0, count)
        samples = _li_partial_sums(s, zv, pts)
        model = TailModel(e0=e0, powers=14, log_powers=logs)
        res = accelerate(samples, model)
        return res if isinstance(res, HPComplex) else res.to_complex()


def _li_partial_sums(s, zv, checkpoints):
    """Partial sums of the strictly nested Li series at the checkpoints.

    cum[j] holds the depth-(j..d) chain sum over indices <= n-1, so each
    level sees only strictly smaller inner indices.
    """
    d = len(s)
    N = checkpoints[-1]
    cum = [mpc(0)] * (d + 2)
    out = []
    ck = 0
    pw = [mpc(1)] * d  # z_j^n
    total = mpc(0)
    for n in range(1, N + 1):
        nf = mpfr(n)
        powcache = {}
        t_at_n = [mpc(0)] * (d + 1)
        for j in range(1, d + 1):
            pw[j - 1] = pw[j - 1] * zv[j - 1]
            inner = mpc(1) if j == d else cum[j + 1]
            if inner == 0:
                continue
            sj = s[j - 1]
            np = powcache.get(sj)
            if np is None:
                np = nf
                for _ in range(sj - 1):
                    np *= nf
                powcache[sj] = np
            t_at_n[j] = pw[j - 1] / np * inner
        total += t_at_n[1]
        for j in range(2, d + 1):
            cum[j] += t_at_n[j]
        if ck < len(checkpoints) and n == checkpoints[ck]:
            out.append((n, total))
            ck += 1
    return out
