"""High-precision real/complex arithmetic layer.

Everything numeric in this package runs on gmpy2's MPFR/MPC types under a
thread-local precision context.  Values that cross module boundaries are
wrapped in :class:`HPReal` / :class:`HPComplex`, which carry a heuristic
error-estimate magnitude alongside the value.  The estimates are *not*
certified enclosures: they come from step-doubling, column differences and
rounding bumps, and callers are expected to test against tolerances that sit
two or more orders of magnitude above them.

The module also hosts ``accelerate``, the sequence-extrapolation routine used
by every slowly convergent tail in the package (partial sums of
``b_n``-weighted series behave like ``N^(1/2-s)`` times powers of ``log N``,
so plain Richardson in ``1/N`` is not enough).
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

LOG2_10 = 3.321928094887362
GUARD_BITS = 64
DEFAULT_DIGITS = 40


def bits_for_digits(digits: int) -> int:
    return int(digits * LOG2_10) + GUARD_BITS


@contextlib.contextmanager
def working_digits(digits: int):
    """Run a block at ``digits`` decimal digits of working precision."""
    ctx = gmpy2.get_context()
    old = ctx.precision
    ctx.precision = bits_for_digits(digits)
    try:
        yield
    finally:
        ctx.precision = old


@contextlib.contextmanager
def working_bits(bits: int):
    ctx = gmpy2.get_context()
    old = ctx.precision
    ctx.precision = bits
    try:
        yield
    finally:
        ctx.precision = old


def current_eps() -> mpfr:
    """One ulp at working precision, used for rounding bumps."""
    return mpfr(2) ** (8 - gmpy2.get_context().precision)


def from_fraction(q: Fraction) -> mpfr:
    return mpfr(q.numerator) / mpfr(q.denominator)


class DomainError(ValueError):
    """Argument outside the principal domain of an elementary function."""


class AccelerationError(RuntimeError):
    """Extrapolation columns failed to settle; diagnostics in args."""


@dataclass(frozen=True)
class HPReal:
    """An mpfr value with a heuristic absolute error estimate."""

    value: mpfr
    err: float = 0.0

    def __add__(self, other):
        o = as_hp(other)
        return HPReal(self.value + o.value, _bump(self, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = as_hp(other)
        return HPReal(self.value - o.value, _bump(self, o))

    def __mul__(self, other):
        o = as_hp(other)
        if isinstance(o, HPComplex):
            return HPComplex(self.value, 0) * o
        scale = max(abs(float(self.value)), abs(float(o.value)), 1.0)
        return HPReal(self.value * o.value, _bump(self, o) * scale)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_hp(other)
        return HPReal(self.value / o.value, _bump(self, o))

    def __neg__(self):
        return HPReal(-self.value, self.err)

    def __float__(self):
        return float(self.value)

    def to_complex(self) -> "HPComplex":
        return HPComplex(mpc(self.value), self.err)

    def __repr__(self):
        return f"HPReal({self.value!s}, err~{self.err:.2e})"


@dataclass(frozen=True)
class HPComplex:
    """An mpc value with a heuristic absolute error estimate.

    Arithmetic propagates ``err >= max`` of the operands' estimates, plus a
    magnitude-scaled rounding bump; this is the invariant the rest of the
    package relies on.
    """

    value: mpc
    err: float = 0.0

    def __post_init__(self):
        if not isinstance(self.value, mpc):
            object.__setattr__(self, "value", mpc(self.value))

    def __add__(self, other):
        o = _as_hpc(other)
        return HPComplex(self.value + o.value, _bump(self, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_hpc(other)
        return HPComplex(self.value - o.value, _bump(self, o))

    def __rsub__(self, other):
        o = _as_hpc(other)
        return HPComplex(o.value - self.value, _bump(self, o))

    def __mul__(self, other):
        o = _as_hpc(other)
        scale = max(abs(self.value), abs(o.value), mpfr(1))
        return HPComplex(self.value * o.value, _bump(self, o) * float(scale))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_hpc(other)
        return HPComplex(self.value / o.value, _bump(self, o))

    def __neg__(self):
        return HPComplex(-self.value, self.err)

    @property
    def real(self) -> mpfr:
        return self.value.real

    @property
    def imag(self) -> mpfr:
        return self.value.imag

    def __abs__(self):
        return abs(self.value)

    def __repr__(self):
        return f"HPComplex({self.value!s}, err~{self.err:.2e})"


def _bump(a, b) -> float:
    return max(a.err, b.err) + float(current_eps())


def as_hp(x):
    if isinstance(x, (HPReal, HPComplex)):
        return x
    if isinstance(x, Fraction):
        return HPReal(from_fraction(x))
    if isinstance(x, mpc) or isinstance(x, complex):
        return HPComplex(mpc(x))
    return HPReal(mpfr(x))


def _as_hpc(x):
    h = as_hp(x)
    return h.to_complex() if isinstance(h, HPReal) else h


# ---------------------------------------------------------------------------
# elementary functions


def _asin_complex(z: mpc) -> mpc:
    return gmpy2.asin(z)


_ELEMENTARY = {
    "exp": gmpy2.exp,
    "log": gmpy2.log,
    "atan": gmpy2.atan,
    "asin": gmpy2.asin,
    "sqrt": gmpy2.sqrt,
}


def elementary(name: str, z, w=None) -> HPComplex:
    """Evaluate exp/log/atan/asin/sqrt/pow on an HPComplex-compatible value.

    Domain violations (log of 0, pow 0**negative) raise :class:`DomainError`
    instead of propagating NaN/inf into later arithmetic.
    """
    zh = _as_hpc(z)
    zv = zh.value
    if name == "pow":
        if w is None:
            raise ValueError("pow needs an exponent")
        wv = _as_hpc(w).value
        if zv == 0:
            if wv.real > 0:
                return HPComplex(mpc(0), zh.err)
            raise DomainError("0 ** non-positive exponent")
        out = gmpy2.exp(wv * gmpy2.log(zv))
    elif name == "log":
        if zv == 0:
            raise DomainError("log 0")
        out = gmpy2.log(zv)
    elif name in _ELEMENTARY:
        out = _ELEMENTARY[name](zv)
    else:
        raise ValueError(f"unknown elementary function {name!r}")
    if gmpy2.is_nan(out.real) or gmpy2.is_nan(out.imag):
        raise DomainError(f"{name}({zv}) left the principal domain")
    scale = max(float(abs(out)), 1.0)
    return HPComplex(out, (zh.err + float(current_eps())) * scale)


# ---------------------------------------------------------------------------
# linear solve (used by accelerate and the limit-mode extrapolator)


def solve_linear(A, b):
    """Gaussian elimination with partial pivoting over mpfr/mpc entries."""
    n = len(A)
    M = [list(row) + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) == 0:
            raise ZeroDivisionError("singular system")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] * inv
            if f == 0:
                continue
            for c in range(col, n + 1):
                M[r][c] -= f * M[col][c]
    x = [None] * n
    for r in range(n - 1, -1, -1):
        acc = M[r][n]
        for c in range(r + 1, n):
            acc -= M[r][c] * x[c]
        x[r] = acc / M[r][r]
    return x


# ---------------------------------------------------------------------------
# sequence acceleration


@dataclass(frozen=True)
class TailModel:
    """Remainder model  S(N) = L + sum_j sum_q c_{jq} N^(-e0-j) log(N)^q.

    ``e0`` may be half-integral (binomial-weighted tails decay like
    ``N^(3/2-s)``); ``log_powers`` bounds q.
    """

    e0: Fraction
    powers: int = 8
    log_powers: int = 0

    def basis(self, count: int):
        funcs = []
        for j in range(self.powers):
            e = self.e0 + j
            for q in range(self.log_powers + 1):
                funcs.append((e, q))
        funcs = funcs[: count]
        return funcs


def accelerate(samples, model: TailModel, min_basis: int = 3):
    """Extrapolate the limit of partial sums sampled at geometric N.

    ``samples`` is a list of ``(N, S_N)`` with S_N real or complex scalars
    (mpfr/mpc).  The limit is obtained by solving the interpolation system of
    ``model`` basis functions through the samples; the error estimate is the
    difference between the solutions with the full sample set and with the
    first sample dropped.  Raises :class:`AccelerationError` when fewer than
    ``min_basis + 1`` samples are supplied or the two solutions disagree
    wildly (relative gap > 1e-3).
    """
    if len(samples) < min_basis + 1:
        raise AccelerationError(f"need at least {min_basis + 1} samples, got {len(samples)}")

    def _solve(rows):
        nb = len(rows) - 1
        funcs = model.basis(nb)
        if len(funcs) < nb:
            nb = len(funcs)
            rows = rows[-(nb + 1):]
        A, rhs = [], []
        for N, s in rows:
            lnN = gmpy2.log(mpfr(N))
            row = [mpfr(1)]
            for e, q in funcs[:nb]:
                row.append(mpfr(N) ** from_fraction(Fraction(-e)) * lnN ** q)
            A.append(row)
            rhs.append(s)
        return solve_linear(A, rhs)[0]

    full = _solve(list(samples))
    trimmed = _solve(list(samples)[1:])
    diff = abs(full - trimmed)
    scale = max(abs(full), mpfr(1))
    if diff / scale > mpfr("1e-3"):
        raise AccelerationError(
            "extrapolation columns disagree",
            {"full": str(full), "trimmed": str(trimmed), "gap": float(diff)},
        )
    err = float(diff) + float(current_eps()) * float(scale)
    if isinstance(full, mpc):
        return HPComplex(full, err)
    return HPReal(full, err)


def geometric_checkpoints(n0: int, count: int, factor: int = 2, align: int = 4):
    """Truncation points n0, n0*factor, ... rounded up to multiples of align."""
    pts = []
    n = n0
    for _ in range(count):
        m = ((n + align - 1) // align) * align
        if pts and m <= pts[-1]:
            m = pts[-1] + align
        pts.append(m)
        n *= factor
    return pts


def mp_str(x, digits: int) -> str:
    """Decimal string at the requested number of significant digits."""
    if isinstance(x, (HPReal, HPComplex)):
        x = x.value
    if isinstance(x, mpc):
        return f"{mp_str(x.real, digits)} + {mp_str(x.imag, digits)}j"
    return gmpy2.mpfr(x).__format__(f".{digits}g")
